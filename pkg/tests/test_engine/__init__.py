# Engine tests package
