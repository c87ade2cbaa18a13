"""Independent brute-force reference implementations used as test oracles.

Deliberately written with plain Python loops and the math module (no numpy,
no imports from the package) so they share no code path with the library.
"""

NAN = float("nan")


def box(diff_vec):
    return 1 if max(abs(d) for d in diff_vec) <= 0.5 else 0


def naive_fit(x, grid, beta, h):
    """Windowed means per row: returns (fhat, counts) as lists of lists."""
    n, m = len(x), len(x[0])
    fhat = [[NAN] * m for _ in range(n)]
    counts = [[0] * m for _ in range(n)]
    for u in range(n):
        for i in range(m):
            acc, cnt = 0.0, 0
            for j in range(m):
                if grid[u][j] and box([(bi - bj) / h for bi, bj in zip(beta[i], beta[j])]):
                    acc += x[u][j]
                    cnt += 1
            counts[u][i] = cnt
            if cnt > 0:
                fhat[u][i] = acc / cnt
    return fhat, counts


def naive_noise_term(grid, beta, counts, h, sigma, u, v, valid):
    total = 0.0
    for i in valid:
        for l in range(len(beta)):
            k2 = box([(bl - bi) / h for bl, bi in zip(beta[l], beta[i])]) ** 2
            if k2:
                if grid[u][l]:
                    total += 1.0 / counts[u][i] ** 2
                if grid[v][l]:
                    total += 1.0 / counts[v][i] ** 2
    return sigma**2 * total / len(valid)


def naive_distances(x, grid, beta, h, sigma):
    """Debiased pairwise squared distances; incomparable pairs get (0, count 0)."""
    n, m = len(x), len(x[0])
    fhat, counts = naive_fit(x, grid, beta, h)
    dsq = [[0.0] * n for _ in range(n)]
    ncols = [[0] * n for _ in range(n)]
    for u in range(n):
        for v in range(n):
            if u == v:
                ncols[u][v] = sum(1 for i in range(m) if counts[u][i] > 0)
                continue
            valid = [i for i in range(m) if counts[u][i] > 0 and counts[v][i] > 0]
            ncols[u][v] = len(valid)
            if not valid:
                continue
            gap = sum((fhat[u][i] - fhat[v][i]) ** 2 for i in valid) / len(valid)
            dsq[u][v] = gap - naive_noise_term(grid, beta, counts, h, sigma, u, v, valid)
    return dsq, ncols


def literal_distances_full_obs(x, beta, h, sigma):
    """Plain-formula distances for a fully observed matrix.

    Direct transliteration with 1/m normalization and the full double sum in
    the noise term; no valid-column bookkeeping (every window holds at least
    the column itself when everything is observed).
    """
    n, m = len(x), len(x[0])
    grid = [[True] * m for _ in range(n)]
    fhat, counts = naive_fit(x, grid, beta, h)
    dsq = [[0.0] * n for _ in range(n)]
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            gap = sum((fhat[u][i] - fhat[v][i]) ** 2 for i in range(m)) / m
            noise = 0.0
            for i in range(m):
                for l in range(m):
                    k2 = box([(bl - bi) / h for bl, bi in zip(beta[l], beta[i])]) ** 2
                    noise += k2 * (1.0 / counts[u][i] ** 2 + 1.0 / counts[v][i] ** 2)
            dsq[u][v] = gap - sigma**2 * noise / m
    return dsq


def naive_smoothed_distance(f, grid, beta, h, u, v):
    """Squared distance between noiseless smoothed rows, valid columns only."""
    fhat, counts = naive_fit(f, grid, beta, h)
    valid = [i for i in range(len(beta)) if counts[u][i] > 0 and counts[v][i] > 0]
    if not valid:
        return NAN
    return sum((fhat[u][i] - fhat[v][i]) ** 2 for i in valid) / len(valid)


def naive_nn_predict(x, grid, dsq, comparable, beta, row_radius, k_nearest, col_radius):
    """Neighborhood averaging with the same fallback chain as the library."""
    n, m = len(x), len(x[0])
    obs = [(u, i) for u in range(n) for i in range(m) if grid[u][i]]
    gmean = sum(x[u][i] for u, i in obs) / len(obs) if obs else 0.0
    rmean = []
    for u in range(n):
        vals = [x[u][i] for i in range(m) if grid[u][i]]
        rmean.append(sum(vals) / len(vals) if vals else gmean)

    def row_hood(u):
        if k_nearest is not None:
            others = sorted(
                (dsq[u][v], v) for v in range(n) if v != u and comparable[u][v]
            )
            return [u] + [v for _, v in others[: k_nearest - 1]]
        hood = [u]
        for v in range(n):
            if v != u and comparable[u][v] and dsq[u][v] <= row_radius**2:
                hood.append(v)
        return hood

    def col_hood(i):
        return [
            j
            for j in range(m)
            if max(abs(bi - bj) for bi, bj in zip(beta[i], beta[j])) <= col_radius
        ]

    est = [[0.0] * m for _ in range(n)]
    for u in range(n):
        rows = row_hood(u)
        for i in range(m):
            cols = col_hood(i)
            vals = [x[v][j] for v in rows for j in cols if grid[v][j]]
            if vals:
                est[u][i] = sum(vals) / len(vals)
                continue
            own = [x[u][j] for j in cols if grid[u][j]]
            est[u][i] = sum(own) / len(own) if own else rmean[u]
    return est


def naive_mse(a, b):
    n, m = len(a), len(a[0])
    return sum((a[u][i] - b[u][i]) ** 2 for u in range(n) for i in range(m)) / (n * m)
