# End-to-end tests for the Gödel Trick solver
