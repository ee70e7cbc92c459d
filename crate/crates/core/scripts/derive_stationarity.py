#!/usr/bin/env python3
"""Derive the exclusive/shared power-balance polynomials and emit Rust code.

For user 1, take a slice of spectrum made of a piece of width `w` from the
exclusive band (density sigma1 + c1) and a unit-width piece of the shared
band (density sigma1, user 2 at sigma2).  Let the user move a fraction `k`
of the slice's power into the exclusive piece.  The capacity of the slice
is C(k); at the current operating point dC/dk must vanish.  The numerator
of dC/dk factors as (w(sigma1 + c1) + sigma1) * Gamma1, so Gamma1 = 0 is
the balance condition and it is affine in c1.

Gamma2 is derived the same way for user 2 (not by relabelling), and the
script checks that it equals Gamma1 with the user indices exchanged.

Usage:
    python3 scripts/derive_stationarity.py > src/partial_overlap/stationarity_generated.rs
"""

import re

import sympy as sp

s1, s2, c1, c2 = sp.symbols("sigma1 sigma2 c1 c2", positive=True)
n1, n2, h11, h12, h21, h22 = sp.symbols("n1 n2 h11 h12 h21 h22", positive=True)
w, k = sp.symbols("w k", positive=True)

SWAP = {s1: s2, s2: s1, c1: c2, c2: c1, n1: n2, n2: n1,
        h11: h22, h22: h11, h12: h21, h21: h12}


def slice_capacity_first():
    total = w * (c1 + s1) + s1
    return (w * sp.log(1 + k * total * h11 / (w * n1))
            + sp.log(1 + (1 - k) * total * h11 / (s2 * h21 + n1))
            + sp.log(1 + s2 * h22 / (h12 * (1 - k) * total + n2)))


def slice_capacity_second():
    total = w * (c2 + s2) + s2
    return (w * sp.log(1 + k * total * h22 / (w * n2))
            + sp.log(1 + (1 - k) * total * h22 / (s1 * h12 + n2))
            + sp.log(1 + s1 * h11 / (h21 * (1 - k) * total + n1)))


def balance_polynomial(capacity, c, sigma_own):
    total = w * (c + sigma_own) + sigma_own
    k_now = w * (c + sigma_own) / total
    deriv = sp.together(sp.diff(capacity, k).subs(k, k_now))
    num, _ = sp.fraction(deriv)
    num = sp.expand(num)
    gamma = sp.expand(sp.cancel(num / total))
    # normalise the sign so the c-free part is nonnegative
    leading = sp.Poly(gamma, c).coeff_monomial(1)
    if sp.simplify(leading.subs({n1: 1, n2: 1, h11: 1, h12: 1, h21: 1, h22: 1,
                                 s1: 1, s2: 1})) < 0:
        gamma = sp.expand(-gamma)
    return gamma


def unit_cross_gain_reference():
    # Commonly quoted expansion, written for unit cross gains.
    return sp.expand(
        h22 * n1**2 * s2 + 2 * h22 * h11 * n1 * s1 * s2 + h22 * h11 * c1 * n1 * s2
        + h22 * n1 * s2**2 - c1 * n2**2 * h11**2 + c1 * h11 * h22 * s2**2
        - c1 * h22 * n2 * h11**2 * s2 + 2 * n2 * h11 * s1 * s2 + h22 * n2 * h11 * s2**2
        + h22 * h11**2 * s1**2 * s2 - c1 * h11**2 * s1**2 + h11 * s1**2 * s2
        + 2 * h22 * h11 * s1 * s2**2 + n2**2 * h11 * s2 - 2 * c1 * n2 * h11**2 * s1)


def rust_expr(expr):
    code = sp.rust_code(expr)
    return re.sub(r"\b(n1|n2|h11|h12|h21|h22)\b", r"p.\1", code)


def emit(name, gamma, c):
    terms = sorted(sp.Add.make_args(sp.expand(gamma)), key=sp.default_sort_key)
    constant = sp.expand(gamma.subs(c, 0))
    slope = sp.expand(sp.diff(gamma, c))
    assert sp.expand(constant + slope * c - gamma) == 0
    cname = str(c)
    out = []
    out.append(f"/// Expanded monomials of the {name} balance polynomial.")
    out.append(f"pub(crate) fn {name}_terms(p: &FlatParams, sigma1: f64, sigma2: f64, {cname}: f64) -> [f64; {len(terms)}] {{")
    out.append("    [")
    for t in terms:
        out.append(f"        {rust_expr(t)},")
    out.append("    ]")
    out.append("}")
    out.append("")
    out.append(f"/// `({name} at {cname} = 0, d{name}/d{cname})`.")
    out.append(f"pub(crate) fn {name}_affine(p: &FlatParams, sigma1: f64, sigma2: f64) -> (f64, f64) {{")
    out.append(f"    let constant = {rust_expr(constant)};")
    out.append(f"    let slope = {rust_expr(slope)};")
    out.append("    (constant, slope)")
    out.append("}")
    return "\n".join(out), len(terms)


def main():
    gamma1 = balance_polynomial(slice_capacity_first(), c1, s1)
    gamma2 = balance_polynomial(slice_capacity_second(), c2, s2)

    assert sp.expand(gamma2 - gamma1.subs(SWAP, simultaneous=True)) == 0, \
        "user-2 balance polynomial is not the relabelled user-1 polynomial"
    assert sp.Poly(gamma1, c1).degree() == 1
    assert sp.Poly(gamma2, c2).degree() == 1

    unit = {h12: 1, h21: 1}
    matches_reference = sp.expand(gamma1.subs(unit) - unit_cross_gain_reference()) == 0
    assert matches_reference, "unit-cross-gain reduction differs from the reference expansion"

    first, n_first = emit("gamma_first", gamma1, c1)
    second, n_second = emit("gamma_second", gamma2, c2)

    print("// @generated by scripts/derive_stationarity.py; do not edit by hand.")
    print("//")
    print("// gamma_first(sigma1, sigma2, c1) is the numerator of dC/dk for user 1,")
    print("// divided by the slice power, with all cross gains kept symbolic.")
    print("// With h12 = h21 = 1 it reduces to the widely quoted unit-cross-gain")
    print("// expansion (checked by the generator). gamma_second is derived")
    print("// independently and equals gamma_first with users exchanged.")
    print("")
    print("#![allow(clippy::all)]")
    print("")
    print("use super::equations::FlatParams;")
    print("")
    print(f"pub(crate) const GAMMA_FIRST_TERMS: usize = {n_first};")
    print(f"pub(crate) const GAMMA_SECOND_TERMS: usize = {n_second};")
    print("")
    print(first)
    print("")
    print(second)


if __name__ == "__main__":
    main()
