# Document language tests package
