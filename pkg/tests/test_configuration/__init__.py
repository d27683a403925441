# Configuration tests package
