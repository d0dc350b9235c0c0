# Test models package
