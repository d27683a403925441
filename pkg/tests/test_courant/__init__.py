# Courant algebroid tests package
