# Integration tests for the Gödel Trick solver
