"""Brute-force reference computations used to freeze expected values."""

import itertools


def components(objects, edges):
    """Connected components by repeated relaxation of a label map."""
    label = {x: i for i, x in enumerate(objects)}
    changed = True
    while changed:
        changed = False
        for x, y in edges:
            lo = min(label[x], label[y])
            if label[x] != lo or label[y] != lo:
                label[x] = label[y] = lo
                changed = True
    return len(set(label.values()))


def invertible(c, a):
    x, y = c.src(a), c.tgt(a)
    return any(
        c.compose(b, a) == c.identity(x) and c.compose(a, b) == c.identity(y)
        for b in c.arrows
        if c.src(b) == y and c.tgt(b) == x
    )


def iso_classes(c):
    edges = [(c.src(a), c.tgt(a)) for a in c.arrows if invertible(c, a)]
    return components(list(c.objects), edges)


def associative(c):
    arrows = list(c.arrows)
    for h, g, f in itertools.product(arrows, repeat=3):
        if c.tgt(f) == c.src(g) and c.tgt(g) == c.src(h):
            if c.compose(h, c.compose(g, f)) != c.compose(c.compose(h, g), f):
                return False
    return True


def composable_strings(c, k):
    """Strings of ``k`` composable arrows, enumerated without any helper."""
    if k == 0:
        return [(x,) for x in c.objects]
    out = [(a,) for a in c.arrows]
    for _ in range(k - 1):
        out = [s + (b,) for s in out for b in c.arrows if c.src(b) == c.tgt(s[-1])]
    return out
