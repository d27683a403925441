# Homotopy transfer tests package
