c = a * b
d = a / b
e = a**2 + b**3
