"""Random S/K expressions with one free variable, for combinatory completeness."""

import random

from ipcf.pca import I, K, S, Ap, Opaque, PVar, ap, encode_num, lambda_star, pca_size

ATOMS = (S, K, Opaque("a"), Opaque("b"), Opaque("c"))


def expression(rng: random.Random, size: int, var: str = "x"):
    if size <= 1:
        return PVar(var) if rng.random() < 0.5 else rng.choice(ATOMS)
    left = rng.randint(1, size - 1)
    return Ap(expression(rng, left, var), expression(rng, size - left, var))


def probe(rng: random.Random):
    match rng.randrange(5):
        case 4:
            return ap(S, I, I)
        case 0:
            return rng.choice(ATOMS)
        case 1:
            return encode_num(rng.randint(0, 3))
        case 2:
            return Ap(K, rng.choice(ATOMS))
    return Ap(Ap(S, K), rng.choice(ATOMS))


def pair(seed: int):
    rng = random.Random(seed)
    return expression(rng, rng.randint(1, 14)), probe(rng)


def overhead(e) -> int:
    """Contractions spent turning (λ*x.e)·a into e[a/x], at most."""
    return 2 * pca_size(lambda_star("x", e)) + 2


def completeness_instance(seed: int, fuel: int = 2000):
    """None when (λ*x.e)·a and e[a/x] agree at matched fuel, else a description.

    If e[a/x] has a normal form within ``fuel``, the abstraction must reach
    the same one within ``fuel`` plus the unfolding overhead. If it does not,
    the abstraction must not converge within ``fuel`` either.
    """
    from ipcf.pca import Diverged, Value, is_normal, pca_apply, pca_eval, pca_subst, print_pca

    e, a = pair(seed)
    lam = lambda_star("x", e)
    if not is_normal(lam):
        return f"λ*x.{print_pca(e)} is not a normal form"
    direct = pca_eval(pca_subst(e, "x", a), fuel)
    if isinstance(direct, Value):
        via = pca_apply(lam, a, fuel + overhead(e))
        if not (isinstance(via, Value) and via.term == direct.term):
            return f"e = {print_pca(e)}, a = {print_pca(a)}: {direct} vs {via}"
    elif not isinstance(pca_apply(lam, a, fuel), Diverged):
        return f"e = {print_pca(e)}, a = {print_pca(a)}: only the abstraction converges"
    return None
