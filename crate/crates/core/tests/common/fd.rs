//! Finite-difference oracles that never touch the jet machinery.

#![allow(dead_code)]

/// One-dimensional central stencils `(offset, weight)` for the k-th
/// derivative, second-order accurate, to be divided by `h^k`.
fn stencil(k: usize) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => panic!("stencil order {k} not tabulated"),
    }
}

fn tensor_stencil(f: &dyn Fn([f64; 4]) -> f64, x: [f64; 4], alpha: [u8; 4], h: f64) -> f64 {
    let mut total = 0.0;
    let s: Vec<_> = alpha.iter().map(|&k| stencil(k as usize)).collect();
    for &(o0, w0) in s[0] {
        for &(o1, w1) in s[1] {
            for &(o2, w2) in s[2] {
                for &(o3, w3) in s[3] {
                    let p = [
                        x[0] + o0 as f64 * h,
                        x[1] + o1 as f64 * h,
                        x[2] + o2 as f64 * h,
                        x[3] + o3 as f64 * h,
                    ];
                    total += w0 * w1 * w2 * w3 * f(p);
                }
            }
        }
    }
    let order: u8 = alpha.iter().sum();
    total / h.powi(order as i32)
}

/// Step used for derivatives of total order `k`.
pub fn default_step(k: usize) -> f64 {
    [0.0, 2e-3, 1e-2, 3e-2, 5e-2][k]
}

/// `∂^α f(x)` by central differences with one Richardson step.
pub fn mixed_partial(f: &dyn Fn([f64; 4]) -> f64, x: [f64; 4], alpha: [u8; 4], h: f64) -> f64 {
    let coarse = tensor_stencil(f, x, alpha, h);
    let fine = tensor_stencil(f, x, alpha, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

fn invert(m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut a = m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..4 {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..4 {
            if i != col {
                let f = a[i][col];
                for j in 0..4 {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

/// `R_abc^d` from finite differences of the metric components, using
/// `R_abc^d = ∂_b Γ^d_ac − ∂_a Γ^d_bc + Γ^d_be Γ^e_ac − Γ^d_ae Γ^e_bc`.
/// Returns `(g, g_inv, riemann[d][a][b][c])`.
pub fn riemann(metric: &dyn Fn([f64; 4], usize, usize) -> f64, x: [f64; 4]) -> ([[f64; 4]; 4], [[f64; 4]; 4], Vec<f64>) {
    let mut g = [[0.0; 4]; 4];
    let mut dg = [[[0.0; 4]; 4]; 4]; // dg[e][a][b]
    let mut ddg = vec![0.0; 256]; // ddg[e][f][a][b]
    for a in 0..4 {
        for b in a..4 {
            let f = |p: [f64; 4]| metric(p, a, b);
            g[a][b] = f(x);
            g[b][a] = g[a][b];
            for e in 0..4 {
                let mut al = [0u8; 4];
                al[e] = 1;
                let v = mixed_partial(&f, x, al, default_step(1));
                dg[e][a][b] = v;
                dg[e][b][a] = v;
                for ff in e..4 {
                    let mut al = [0u8; 4];
                    al[e] += 1;
                    al[ff] += 1;
                    let v = mixed_partial(&f, x, al, default_step(2));
                    for (p, q) in [(e, ff), (ff, e)] {
                        ddg[64 * p + 16 * q + 4 * a + b] = v;
                        ddg[64 * p + 16 * q + 4 * b + a] = v;
                    }
                }
            }
        }
    }
    let gi = invert(g);
    // dgi[e][a][b] = −g^af ∂_e g_fh g^hb
    let mut dgi = [[[0.0; 4]; 4]; 4];
    for e in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for f in 0..4 {
                    for h in 0..4 {
                        s -= gi[a][f] * dg[e][f][h] * gi[h][b];
                    }
                }
                dgi[e][a][b] = s;
            }
        }
    }
    let low = |d: usize, b: usize, c: usize| 0.5 * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
    let dlow = |e: usize, d: usize, b: usize, c: usize| {
        0.5 * (ddg[64 * e + 16 * b + 4 * d + c] + ddg[64 * e + 16 * c + 4 * d + b] - ddg[64 * e + 16 * d + 4 * b + c])
    };
    let mut gam = [[[0.0; 4]; 4]; 4];
    let mut dgam = vec![0.0; 256]; // [e][a][b][c]
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    gam[a][b][c] += gi[a][d] * low(d, b, c);
                    for e in 0..4 {
                        dgam[64 * e + 16 * a + 4 * b + c] += dgi[e][a][d] * low(d, b, c) + gi[a][d] * dlow(e, d, b, c);
                    }
                }
            }
        }
    }
    let mut riem = vec![0.0; 256];
    for d in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let mut s = dgam[64 * b + 16 * d + 4 * a + c] - dgam[64 * a + 16 * d + 4 * b + c];
                    for e in 0..4 {
                        s += gam[d][b][e] * gam[e][a][c] - gam[d][a][e] * gam[e][b][c];
                    }
                    riem[64 * d + 16 * a + 4 * b + c] = s;
                }
            }
        }
    }
    (g, gi, riem)
}

/// `R_abcd R^abcd` from [`riemann`].
pub fn kretschmann(metric: &dyn Fn([f64; 4], usize, usize) -> f64, x: [f64; 4]) -> f64 {
    let (g, gi, r) = riemann(metric, x);
    let rr = |d: usize, a: usize, b: usize, c: usize| r[64 * d + 16 * a + 4 * b + c];
    // lowered[a][b][c][d] and fully raised
    let mut lowered = vec![0.0; 256];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    lowered[64 * a + 16 * b + 4 * c + d] = (0..4).map(|e| rr(e, a, b, c) * g[e][d]).sum();
                }
            }
        }
    }
    let mut total = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut up = 0.0;
                    for p in 0..4 {
                        for q in 0..4 {
                            for s in 0..4 {
                                up += gi[a][p] * gi[b][q] * gi[c][s] * rr(d, p, q, s);
                            }
                        }
                    }
                    total += lowered[64 * a + 16 * b + 4 * c + d] * up;
                }
            }
        }
    }
    total
}
