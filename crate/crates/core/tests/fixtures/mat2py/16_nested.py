for i in range(1, m + 1):
    for j in range(1, len(v) + 1):
        if v(j) > 0:
            M(i, j) = v(j)**2
