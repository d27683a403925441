# Dirac structure tests package
