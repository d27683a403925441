# Shifted symplectic tests package
