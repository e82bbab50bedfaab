# Unit tests for the Gödel Trick solver
