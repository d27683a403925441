# Command-line tests package
