use super::matrix::{CMat, CMat2, CMat4, Ket, Ket2, C64, ONE, ZERO};
use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and eigenvectors (matching columns) of a Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct Eigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: CMat<N>,
}

/// Closed-form eigendecomposition of a 2×2 Hermitian matrix.
///
/// An exactly degenerate input returns the computational basis.
pub fn hermitian_eigen2(m: &CMat2) -> Eigen<2> {
    let p = m.0[0][0].re;
    let s = m.0[1][1].re;
    let q = m.0[0][1];
    let mean = 0.5 * (p + s);
    let d = 0.5 * (p - s);
    let r = d.hypot(q.norm());
    if r == 0.0 {
        return Eigen {
            values: [mean, mean],
            vectors: CMat2::identity(),
        };
    }
    // eigenvector of the upper eigenvalue; pick the form free of cancellation
    let upper = if d >= 0.0 {
        Ket([C64::new(r + d, 0.0), q.conj()])
    } else {
        Ket([q, C64::new(r - d, 0.0)])
    };
    let mut upper = upper.scale(C64::new(1.0 / upper.norm(), 0.0));
    let mut lower = Ket([-upper.0[1].conj(), upper.0[0].conj()]);
    upper.fix_phase();
    lower.fix_phase();
    Eigen {
        values: [mean - r, mean + r],
        vectors: CMat2::from_columns([lower, upper]),
    }
}

fn off_diagonal_norm<const N: usize>(a: &CMat<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver for a Hermitian N×N matrix.
pub fn hermitian_eigen<const N: usize>(m: &CMat<N>) -> Result<Eigen<N>> {
    m.ensure_hermitian()?;
    let mut a = *m;
    let mut w = CMat::<N>::identity();
    let scale = {
        let mut f = 0.0;
        for row in &a.0 {
            for v in row {
                f += v.norm_sqr();
            }
        }
        f.sqrt()
    };
    let target = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                let b = a.0[p][q];
                let bn = b.norm();
                if bn <= target * 1e-3 {
                    continue;
                }
                let phase = b.conj() / bn;
                let theta = (a.0[q][q].re - a.0[p][p].re) / (2.0 * bn);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut v = CMat::<N>::identity();
                v.0[p][p] = C64::new(c, 0.0);
                v.0[p][q] = C64::new(s, 0.0);
                v.0[q][p] = phase * (-s);
                v.0[q][q] = phase * c;
                a = v.adjoint() * a * v;
                // keep the working matrix exactly Hermitian
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                for i in 0..N {
                    a.0[i][i].im = 0.0;
                }
                w = w * v;
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let mut values = [0.0; N];
    let mut cols = [Ket::<N>::zeros(); N];
    for (k, &i) in order.iter().enumerate() {
        values[k] = a.0[i][i].re;
        let mut col = w.column(i);
        col.fix_phase();
        cols[k] = col;
    }
    Ok(Eigen {
        values,
        vectors: CMat::from_columns(cols),
    })
}

/// Propagator e^{-iHt} by spectral decomposition of the Hermitian `h`.
pub fn unitary_exp(h: &CMat4, t: f64) -> Result<CMat4> {
    let eig = hermitian_eigen(h)?;
    let phases = eig.values.map(|l| C64::from_polar(1.0, -l * t));
    Ok(eig.vectors * CMat4::diag(phases) * eig.vectors.adjoint())
}

/// Singular value decomposition C = U diag(s) V† of a 2×2 complex matrix.
///
/// Columns of `u` and `v` are the left and right singular vectors, with
/// `s[0] ≥ s[1] ≥ 0`. Each left vector obeys the phase convention, and its
/// right partner carries the same phase so the product is unchanged.
#[derive(Debug, Clone, Copy)]
pub struct Svd2 {
    pub u: CMat2,
    pub s: [f64; 2],
    pub v: CMat2,
}

impl Svd2 {
    pub fn reconstruct(&self) -> CMat2 {
        self.u * CMat2::diag([C64::new(self.s[0], 0.0), C64::new(self.s[1], 0.0)]) * self.v.adjoint()
    }
}

pub fn svd_2x2(c: &CMat2) -> Svd2 {
    let det = (c.0[0][0] * c.0[1][1] - c.0[0][1] * c.0[1][0]).norm();
    let gram = c.adjoint() * *c;
    let eig = hermitian_eigen2(&gram);
    let s1 = eig.values[1].max(0.0).sqrt();
    // σ₁σ₂ = |det C| keeps the small singular value accurate
    let s2 = if s1 > 0.0 { (det / s1).min(s1) } else { 0.0 };
    let (v1, v2) = if eig.values[0] == eig.values[1] {
        (eig.vectors.column(0), eig.vectors.column(1))
    } else {
        (eig.vectors.column(1), eig.vectors.column(0))
    };

    let cv1 = c.apply(&v1);
    let n1 = cv1.norm();
    let u1 = if n1 > 0.0 {
        cv1.scale(C64::new(1.0 / n1, 0.0))
    } else {
        Ket2::basis(0)
    };
    let mut u2 = Ket([-u1.0[1].conj(), u1.0[0].conj()]);
    let w = u2.inner(&c.apply(&v2));
    if w.norm() > 0.0 {
        u2 = u2.scale(w / w.norm());
    }

    let mut pairs = [(u1, v1), (u2, v2)];
    for (u, v) in pairs.iter_mut() {
        let f = u.fix_phase();
        *v = v.scale(f);
    }
    Svd2 {
        u: CMat2::from_columns([pairs[0].0, pairs[1].0]),
        s: [s1, s2],
        v: CMat2::from_columns([pairs[0].1, pairs[1].1]),
    }
}

/// Unit-modulus check helper used by tests and callers that want `ONE`-relative phases.
pub fn relative_phase(a: C64, b: C64) -> C64 {
    let z = a * b.conj();
    if z.norm() == 0.0 {
        ONE
    } else {
        z / z.norm()
    }
}
