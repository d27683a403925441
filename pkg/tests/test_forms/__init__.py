# Forms bicomplex tests package
