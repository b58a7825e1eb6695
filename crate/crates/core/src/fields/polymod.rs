//! Dense polynomials over F_p, coefficients stored constant term first.

pub(crate) type Poly = Vec<u64>;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn trim(f: &mut Poly) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

pub(crate) fn degree(f: &Poly) -> Option<usize> {
    if f.is_empty() {
        None
    } else {
        Some(f.len() - 1)
    }
}

pub(crate) fn sub(f: &Poly, g: &Poly, p: u64) -> Poly {
    let n = f.len().max(g.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let a = f.get(i).copied().unwrap_or(0);
            let b = g.get(i).copied().unwrap_or(0);
            (a + p - b) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(f: &Poly, g: &Poly, p: u64) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn rem(f: &Poly, g: &Poly, p: u64) -> Poly {
    let dg = degree(g).expect("division by zero polynomial");
    let mut r = f.clone();
    trim(&mut r);
    let lead_inv = inv_mod(g[dg], p);
    while let Some(dr) = degree(&r) {
        if dr < dg {
            break;
        }
        let q = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dg;
        for (i, &c) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(q, c, p)) % p;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn quo(f: &Poly, g: &Poly, p: u64) -> Poly {
    let dg = degree(g).expect("division by zero polynomial");
    let mut r = f.clone();
    trim(&mut r);
    let Some(df) = degree(&r) else {
        return Vec::new();
    };
    if df < dg {
        return Vec::new();
    }
    let mut q = vec![0u64; df - dg + 1];
    let lead_inv = inv_mod(g[dg], p);
    while let Some(dr) = degree(&r) {
        if dr < dg {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dg;
        q[shift] = c;
        for (i, &gc) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(c, gc, p)) % p;
        }
        trim(&mut r);
    }
    trim(&mut q);
    q
}

pub(crate) fn monic(f: &Poly, p: u64) -> Poly {
    match f.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = inv_mod(l, p);
            f.iter().map(|&c| mul_mod(c, inv, p)).collect()
        }
    }
}

pub(crate) fn gcd(f: &Poly, g: &Poly, p: u64) -> Poly {
    let mut a = f.clone();
    let mut b = g.clone();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

/// `base^e mod modulus`.
pub(crate) fn pow_rem(base: &Poly, mut e: u64, modulus: &Poly, p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = rem(base, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), modulus, p);
        }
        b = rem(&mul(&b, &b, p), modulus, p);
        e >>= 1;
    }
    rem(&acc, modulus, p)
}

pub(crate) fn eval(f: &Poly, x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// Product of the distinct linear factors of `f`: `gcd(f, x^p − x)`.
pub(crate) fn linear_part(f: &Poly, p: u64) -> Poly {
    let xp = pow_rem(&vec![0, 1], p, f, p);
    gcd(f, &sub(&xp, &vec![0, 1], p), p)
}

/// Roots of a squarefree product of distinct linear factors, ascending.
pub(crate) fn split_linear(g: &Poly, p: u64) -> Vec<u64> {
    let mut roots = Vec::new();
    if p < 64 {
        roots = (0..p).filter(|&x| eval(g, x, p) == 0).collect();
        return roots;
    }
    let mut stack = vec![monic(g, p)];
    while let Some(h) = stack.pop() {
        match degree(&h) {
            None | Some(0) => {}
            Some(1) => roots.push((p - h[0]) % p),
            Some(d) => {
                // deterministic Cantor–Zassenhaus: shifts δ = 0, 1, 2, ...
                for delta in 0..p {
                    let s = pow_rem(&vec![delta, 1], (p - 1) / 2, &h, p);
                    let t = gcd(&h, &sub(&s, &vec![1], p), p);
                    let dt = degree(&t).unwrap_or(0);
                    if dt > 0 && dt < d {
                        let other = quo(&h, &t, p);
                        stack.push(t);
                        stack.push(other);
                        break;
                    }
                }
            }
        }
    }
    roots.sort_unstable();
    roots
}

/// Degrees of the irreducible factors of a squarefree monic `f`.
pub(crate) fn factor_degrees(f: &Poly, p: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = monic(f, p);
    let x: Poly = vec![0, 1];
    let mut h = x.clone();
    let mut i = 0;
    while degree(&rest).unwrap_or(0) > 0 {
        i += 1;
        if 2 * i > degree(&rest).unwrap() {
            out.push(degree(&rest).unwrap());
            break;
        }
        h = pow_rem(&h, p, &rest, p);
        let g = gcd(&rest, &sub(&h, &x, p), p);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 {
            out.extend(std::iter::repeat_n(i, dg / i));
            rest = quo(&rest, &g, p);
            h = rem(&h, &rest, p);
        }
    }
    out.sort_unstable();
    out
}
