# hypsurf test suite
