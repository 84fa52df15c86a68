//! Dense nonsymmetric eigensolver: balance, Householder reduction to upper
//! Hessenberg form, then Francis double-shift QR (the classic EISPACK/JAMA
//! `hqr2` scheme, ported to 0-based flat storage). Deliberately
//! self-contained: this is the crate's reference oracle and must not share
//! any code with the bound computations it is used to check.

use num_complex::Complex64;

use super::OracleError;

/// Parlett–Reinsch balancing (scaling pass only, radix 2 so no rounding).
/// Reduces the norm imbalance between rows and columns, which sharpens the
/// QR iteration's deflation tests. Similarity transform: eigenvalues exact.
pub(super) fn balance(n: usize, a: &mut [f64]) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let idx = |i: usize, j: usize| i * n + j;
    for _pass in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[idx(j, i)].abs();
                    r += a[idx(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[idx(i, j)] *= g;
                }
                for j in 0..n {
                    a[idx(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    // A matrix that still wants rescaling after 100 passes is adversarial;
    // balancing is only a conditioner, so stopping early is safe.
}

/// Householder reduction to upper Hessenberg form in place. When `z` is
/// given (an n×n identity on entry) the orthogonal factor is accumulated so
/// that `A = Z H Zᵀ` on exit.
pub(super) fn hessenberg(n: usize, a: &mut [f64], mut z: Option<&mut [f64]>) {
    let idx = |i: usize, j: usize| i * n + j;
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        // Reflector zeroing column k below the subdiagonal.
        let scale: f64 = (k + 1..n).map(|i| a[idx(i, k)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm2 = 0.0;
        for i in k + 1..n {
            v[i] = a[idx(i, k)] / scale;
            norm2 += v[i] * v[i];
        }
        let mut sigma = norm2.sqrt();
        if v[k + 1] < 0.0 {
            sigma = -sigma;
        }
        v[k + 1] += sigma;
        let beta = sigma * v[k + 1]; // ½‖v‖², strictly positive here

        // Left: rows k+1..n of columns k..n get (I − vvᵀ/β).
        for j in k..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * a[idx(i, j)]).sum();
            let t = dot / beta;
            for i in k + 1..n {
                a[idx(i, j)] -= t * v[i];
            }
        }
        // Right: columns k+1..n of all rows.
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| v[j] * a[idx(i, j)]).sum();
            let t = dot / beta;
            for j in k + 1..n {
                a[idx(i, j)] -= t * v[j];
            }
        }
        if let Some(z) = z.as_deref_mut() {
            for i in 0..n {
                let dot: f64 = (k + 1..n).map(|j| v[j] * z[idx(i, j)]).sum();
                let t = dot / beta;
                for j in k + 1..n {
                    z[idx(i, j)] -= t * v[j];
                }
            }
        }

        a[idx(k + 1, k)] = -sigma * scale;
        for i in k + 2..n {
            a[idx(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Returns the
/// eigenvalues; when `z` is given, `h` is driven to real quasi-triangular
/// Schur form `T` and `z` accumulates the orthogonal similarity.
///
/// With `z` absent the similarity updates are restricted to the active
/// window, which is cheaper and is what the large-n benchmark path uses.
pub(super) fn francis(
    n: usize,
    h: &mut [f64],
    mut z: Option<&mut [f64]>,
) -> Result<Vec<Complex64>, OracleError> {
    let nn = n;
    let idx = |i: usize, j: usize| i * nn + j;
    let eps = f64::EPSILON;
    let mut values = vec![Complex64::new(0.0, 0.0); nn];
    if nn == 0 {
        return Ok(values);
    }

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[idx(i, j)].abs();
        }
    }
    if norm == 0.0 {
        return Ok(values);
    }

    let full = z.is_some();
    let low: isize = 0;
    let high: isize = nn as isize - 1;
    let mut en = high; // active block end
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let budget = 40 * nn.max(8);

    let (mut p, mut q, mut r, mut s, mut x, mut y, mut w, mut zz);

    while en >= low {
        let nu = en as usize;
        // Look for a single small subdiagonal element.
        let mut l = en;
        while l > low {
            let lu = l as usize;
            s = h[idx(lu - 1, lu - 1)].abs() + h[idx(lu, lu)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[idx(lu, lu - 1)].abs() <= eps * s {
                break;
            }
            l -= 1;
        }

        if l == en {
            // One root found. The subdiagonal entry that passed the
            // negligibility test is an implicit zero from here on; write
            // the zero so the final array is a genuine Schur factor.
            h[idx(nu, nu)] += exshift;
            values[nu] = Complex64::new(h[idx(nu, nu)], 0.0);
            if full && nu > 0 {
                h[idx(nu, nu - 1)] = 0.0;
            }
            en -= 1;
            iter = 0;
        } else if l == en - 1 {
            // Two roots found: solve the trailing 2×2 block.
            w = h[idx(nu, nu - 1)] * h[idx(nu - 1, nu)];
            p = (h[idx(nu - 1, nu - 1)] - h[idx(nu, nu)]) / 2.0;
            q = p * p + w;
            zz = q.abs().sqrt();
            h[idx(nu, nu)] += exshift;
            h[idx(nu - 1, nu - 1)] += exshift;
            x = h[idx(nu, nu)];
            if q >= 0.0 {
                // Real pair.
                zz = if p >= 0.0 { p + zz } else { p - zz };
                values[nu - 1] = Complex64::new(x + zz, 0.0);
                values[nu] = if zz != 0.0 {
                    Complex64::new(x - w / zz, 0.0)
                } else {
                    values[nu - 1]
                };
                if full {
                    // Rotate the block to upper triangular so T is clean.
                    x = h[idx(nu, nu - 1)];
                    s = x.abs() + zz.abs();
                    p = x / s;
                    q = zz / s;
                    r = (p * p + q * q).sqrt();
                    p /= r;
                    q /= r;
                    for j in nu - 1..nn {
                        zz = h[idx(nu - 1, j)];
                        h[idx(nu - 1, j)] = q * zz + p * h[idx(nu, j)];
                        h[idx(nu, j)] = q * h[idx(nu, j)] - p * zz;
                    }
                    for i in 0..=nu {
                        zz = h[idx(i, nu - 1)];
                        h[idx(i, nu - 1)] = q * zz + p * h[idx(i, nu)];
                        h[idx(i, nu)] = q * h[idx(i, nu)] - p * zz;
                    }
                    if let Some(z) = z.as_deref_mut() {
                        for i in 0..nn {
                            zz = z[idx(i, nu - 1)];
                            z[idx(i, nu - 1)] = q * zz + p * z[idx(i, nu)];
                            z[idx(i, nu)] = q * z[idx(i, nu)] - p * zz;
                        }
                    }
                    // The rotation annihilates the block subdiagonal in
                    // exact arithmetic; commit the zero.
                    h[idx(nu, nu - 1)] = 0.0;
                }
            } else {
                // Conjugate pair, stored exactly conjugate.
                values[nu - 1] = Complex64::new(x + p, zz);
                values[nu] = Complex64::new(x + p, -zz);
            }
            if full && nu >= 2 {
                // Same implicit zero as the single-root case, one row up.
                h[idx(nu - 1, nu - 2)] = 0.0;
            }
            en -= 2;
            iter = 0;
        } else {
            // No convergence yet: perform one double-shift QR sweep.
            x = h[idx(nu, nu)];
            y = h[idx(nu - 1, nu - 1)];
            w = h[idx(nu, nu - 1)] * h[idx(nu - 1, nu)];

            if iter == 10 || iter == 20 {
                // Wilkinson's ad hoc exceptional shift.
                exshift += x;
                for i in low as usize..=nu {
                    h[idx(i, i)] -= x;
                }
                s = h[idx(nu, nu - 1)].abs() + h[idx(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            iter += 1;
            total_iter += 1;
            if total_iter > budget {
                return Err(OracleError::NonConvergence { remaining: nu + 1 });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = en - 2;
            loop {
                let mu = m as usize;
                zz = h[idx(mu, mu)];
                r = x - zz;
                s = y - zz;
                p = (r * s - w) / h[idx(mu + 1, mu)] + h[idx(mu, mu + 1)];
                q = h[idx(mu + 1, mu + 1)] - zz - r - s;
                r = h[idx(mu + 2, mu + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[idx(mu, mu - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h[idx(mu - 1, mu - 1)].abs()
                                + zz.abs()
                                + h[idx(mu + 1, mu + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;
            for i in mu + 2..=nu {
                h[idx(i, i - 2)] = 0.0;
                if i > mu + 2 {
                    h[idx(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=en, chasing the bulge from m.
            for k in mu..nu {
                let notlast = k != nu - 1;
                if k != mu {
                    p = h[idx(k, k - 1)];
                    q = h[idx(k + 1, k - 1)];
                    r = if notlast { h[idx(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != mu {
                    h[idx(k, k - 1)] = -s * x;
                } else if l != m {
                    h[idx(k, k - 1)] = -h[idx(k, k - 1)];
                }
                p += s;
                x = p / s;
                y = q / s;
                zz = r / s;
                q /= p;
                r /= p;

                let row_end = if full { nn } else { nu + 1 };
                let col_start = if full { 0 } else { l as usize };
                // Row modification.
                for j in k..row_end {
                    p = h[idx(k, j)] + q * h[idx(k + 1, j)];
                    if notlast {
                        p += r * h[idx(k + 2, j)];
                        h[idx(k + 2, j)] -= p * zz;
                    }
                    h[idx(k, j)] -= p * x;
                    h[idx(k + 1, j)] -= p * y;
                }
                // Column modification.
                for i in col_start..=nu.min(k + 3) {
                    p = x * h[idx(i, k)] + y * h[idx(i, k + 1)];
                    if notlast {
                        p += zz * h[idx(i, k + 2)];
                        h[idx(i, k + 2)] -= p * r;
                    }
                    h[idx(i, k)] -= p;
                    h[idx(i, k + 1)] -= p * q;
                }
                // Accumulate the similarity.
                if let Some(z) = z.as_deref_mut() {
                    for i in 0..nn {
                        p = x * z[idx(i, k)] + y * z[idx(i, k + 1)];
                        if notlast {
                            p += zz * z[idx(i, k + 2)];
                            z[idx(i, k + 2)] -= p * r;
                        }
                        z[idx(i, k)] -= p;
                        z[idx(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }

    if full {
        // Bulge chasing only maintains entries below the first
        // subdiagonal implicitly (they are exact zeros of the similarity);
        // scrub the stale array contents so `h` is quasi-triangular.
        for i in 2..nn {
            for j in 0..i - 1 {
                h[idx(i, j)] = 0.0;
            }
        }
    }

    Ok(values)
}

/// Frobenius-norm relative residual of the Schur factorization,
/// `‖B Z − Z T‖_F / max(1, ‖B‖_F)`, computed on the balanced matrix `B`.
pub(super) fn schur_residual(n: usize, b: &[f64], z: &[f64], t: &[f64]) -> f64 {
    let idx = |i: usize, j: usize| i * n + j;
    let mut num = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut bz = 0.0;
            let mut zt = 0.0;
            for k in 0..n {
                bz += b[idx(i, k)] * z[idx(k, j)];
                zt += z[idx(i, k)] * t[idx(k, j)];
            }
            let d = bz - zt;
            num += d * d;
        }
    }
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    num.sqrt() / bnorm.max(1.0)
}
