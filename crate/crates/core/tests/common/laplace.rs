//! Electrostatic relaxation oracle: a grounded conducting half-spheroid
//! standing on a grounded plane in a uniform applied field along its axis.
//!
//! Axisymmetric finite volumes on a tensor grid graded geometrically away
//! from the apex, with a Neumann outer wall and a fixed potential on the lid,
//! solved by Jacobi-preconditioned conjugate gradients. Links that cross the
//! conductor surface are cut at the true crossing point; plain staircasing
//! leaves an O(h) potential error next to the surface, which becomes an
//! O(1) error in the apex gradient. The
//! apex field comes from a cubic fit of the axial potential just above the
//! apex.

pub struct Settings {
    /// First cell size as a fraction of the apex radius.
    pub h0_over_rho: f64,
    pub growth: f64,
    /// Domain radius and height in units of the spheroid length.
    pub extent: f64,
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self { h0_over_rho: 1.0 / 16.0, growth: 1.04, extent: 20.0, tol: 1e-10 }
    }
}

/// Points from `from` towards `to` with steps `h0·gᵏ`; the last step is
/// stretched or merged so `to` is hit exactly.
fn graded(from: f64, to: f64, h0: f64, g: f64) -> Vec<f64> {
    let dir = (to - from).signum();
    let span = (to - from).abs();
    let mut pts = vec![from];
    let (mut pos, mut h) = (0.0, h0);
    while pos + h < span {
        pos += h;
        pts.push(from + dir * pos);
        h *= g;
    }
    if span - pos < 0.5 * h / g && pts.len() > 1 {
        pts.pop();
    }
    pts.push(to);
    pts
}

/// Apex field over applied field for semi-axis `length` and apex radius of
/// curvature `tip_radius`.
pub fn apex_enhancement(length: f64, tip_radius: f64, s: &Settings) -> f64 {
    let l = length;
    let b = (tip_radius * length).sqrt();
    let h0 = s.h0_over_rho * tip_radius;
    let big = s.extent * l;
    let r = graded(0.0, big, h0, s.growth);
    let mut z: Vec<f64> = graded(l, 0.0, h0, s.growth).into_iter().rev().collect();
    z.extend(graded(l, big, h0, s.growth).into_iter().skip(1));
    let (nr, nz) = (r.len(), z.len());
    let j_apex = z.iter().position(|&v| v == l).expect("apex on grid");
    let id = |i: usize, j: usize| j * nr + i;

    // Dirichlet mask and values; E0 = 1
    let inside = |rv: f64, zv: f64| (rv / b).powi(2) + (zv / l).powi(2) <= 1.0 + 1e-12;
    let mut fixed = vec![false; nr * nz];
    let mut conductor = vec![false; nr * nz];
    let mut phi_d = vec![0.0; nr * nz];
    for j in 0..nz {
        for i in 0..nr {
            let p = id(i, j);
            if inside(r[i], z[j]) && j > 0 {
                conductor[p] = true;
                fixed[p] = true;
            } else if j == 0 {
                fixed[p] = true;
            } else if j == nz - 1 {
                fixed[p] = true;
                phi_d[p] = z[j];
            }
        }
    }

    // face half-radii and cell heights
    let r_plus: Vec<f64> = (0..nr).map(|i| if i + 1 < nr { 0.5 * (r[i] + r[i + 1]) } else { r[i] }).collect();
    let r_minus: Vec<f64> = (0..nr).map(|i| if i > 0 { 0.5 * (r[i - 1] + r[i]) } else { 0.0 }).collect();
    let dz: Vec<f64> = (0..nz)
        .map(|j| {
            let lo = if j > 0 { 0.5 * (z[j - 1] + z[j]) } else { z[j] };
            let hi = if j + 1 < nz { 0.5 * (z[j] + z[j + 1]) } else { z[j] };
            hi - lo
        })
        .collect();
    let area: Vec<f64> = (0..nr).map(|i| 0.5 * (r_plus[i].powi(2) - r_minus[i].powi(2))).collect();

    // Couplings to the east and north neighbours. A link from a free node
    // into the conductor is shortened to the true surface crossing, so the
    // zero potential sits on the spheroid rather than on the staircase.
    let surf_r = |zv: f64| b * (1.0 - (zv / l).powi(2)).max(0.0).sqrt();
    let surf_z = |rv: f64| l * (1.0 - (rv / b).powi(2)).max(0.0).sqrt();
    let mut ce = vec![0.0; nr * nz];
    let mut cn = vec![0.0; nr * nz];
    for j in 0..nz {
        for i in 0..nr {
            let p = id(i, j);
            if i + 1 < nr {
                let q = p + 1;
                let mut d = r[i + 1] - r[i];
                if conductor[p] != conductor[q] {
                    let free_r = if conductor[p] { r[i + 1] } else { r[i] };
                    d = (free_r - surf_r(z[j])).abs().max(1e-3 * d);
                }
                ce[p] = r_plus[i] * dz[j] / d;
            }
            if j + 1 < nz {
                let q = id(i, j + 1);
                let mut d = z[j + 1] - z[j];
                if conductor[p] != conductor[q] {
                    let free_z = if conductor[p] { z[j + 1] } else { z[j] };
                    d = (free_z - surf_z(r[i])).abs().max(1e-3 * d);
                }
                cn[p] = area[i] / d;
            }
        }
    }

    // y = K x over all nodes (graph Laplacian form)
    let apply = |x: &[f64], y: &mut [f64]| {
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..nz {
            for i in 0..nr {
                let p = id(i, j);
                if i + 1 < nr {
                    let c = ce[p] * (x[p] - x[p + 1]);
                    y[p] += c;
                    y[p + 1] -= c;
                }
                if j + 1 < nz {
                    let q = id(i, j + 1);
                    let c = cn[p] * (x[p] - x[q]);
                    y[p] += c;
                    y[q] -= c;
                }
            }
        }
    };
    let mut diag = vec![0.0; nr * nz];
    for j in 0..nz {
        for i in 0..nr {
            let p = id(i, j);
            if i + 1 < nr {
                diag[p] += ce[p];
                diag[p + 1] += ce[p];
            }
            if j + 1 < nz {
                diag[p] += cn[p];
                diag[id(i, j + 1)] += cn[p];
            }
        }
    }

    // K_ff x = −K_fd φ_d
    let n = nr * nz;
    let mut rhs = vec![0.0; n];
    apply(&phi_d, &mut rhs);
    for p in 0..n {
        rhs[p] = if fixed[p] { 0.0 } else { -rhs[p] };
    }
    let mask = |v: &mut [f64]| {
        for p in 0..n {
            if fixed[p] {
                v[p] = 0.0;
            }
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut x = vec![0.0; n];
    // uniform-field start
    for j in 0..nz {
        for i in 0..nr {
            if !fixed[id(i, j)] {
                x[id(i, j)] = z[j];
            }
        }
    }
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    mask(&mut ax);
    let mut res: Vec<f64> = (0..n).map(|p| rhs[p] - ax[p]).collect();
    mask(&mut res);
    let mut zv: Vec<f64> = (0..n).map(|p| if fixed[p] { 0.0 } else { res[p] / diag[p] }).collect();
    let mut dir = zv.clone();
    let mut rz = dot(&res, &zv);
    let mut q = vec![0.0; n];
    for _ in 0..20 * n {
        apply(&dir, &mut q);
        mask(&mut q);
        let alpha = rz / dot(&dir, &q);
        for p in 0..n {
            x[p] += alpha * dir[p];
            res[p] -= alpha * q[p];
        }
        for p in 0..n {
            zv[p] = if fixed[p] { 0.0 } else { res[p] / diag[p] };
        }
        // the scaled residual is a local potential correction, so it is
        // judged against the applied potential scale E0·L
        if zv.iter().fold(0.0f64, |m, v| m.max(v.abs())) < s.tol * l {
            break;
        }
        let rz_new = dot(&res, &zv);
        let beta = rz_new / rz;
        rz = rz_new;
        for p in 0..n {
            dir[p] = zv[p] + beta * dir[p];
        }
    }

    // φ(L + s) ≈ a₁s + a₂s² + a₃s³ through the first axial nodes
    let pts: Vec<(f64, f64)> = (1..=6).map(|k| (z[j_apex + k] - l, x[id(0, j_apex + k)])).collect();
    let mut m = [[0.0; 3]; 3];
    let mut v = [0.0; 3];
    for &(sv, ph) in &pts {
        let basis = [sv, sv * sv, sv * sv * sv];
        for a in 0..3 {
            v[a] += basis[a] * ph;
            for c in 0..3 {
                m[a][c] += basis[a] * basis[c];
            }
        }
    }
    solve3(m, v)[0]
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> [f64; 3] {
    for k in 0..3 {
        let piv = (k..3).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        m.swap(k, piv);
        v.swap(k, piv);
        for r in k + 1..3 {
            let f = m[r][k] / m[k][k];
            for c in k..3 {
                m[r][c] -= f * m[k][c];
            }
            v[r] -= f * v[k];
        }
    }
    let mut out = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|c| m[k][c] * out[c]).sum();
        out[k] = (v[k] - s) / m[k][k];
    }
    out
}
