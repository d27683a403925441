# L-infinity algebroid tests package
