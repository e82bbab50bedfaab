# Test package for the Gödel Trick solver
