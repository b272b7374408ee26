# Unit Tests Package
