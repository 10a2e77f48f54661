use crate::dyadic::Dyadic;
use crate::interval::{eval_poly, Interval, IntervalBox};
use crate::khovanskii::KhovanskiiSystem;

/// Result of one Krawczyk step on a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    /// `K(X)` misses `X`: no solution in `X`.
    Empty,
    /// `K(X)` lies in the interior of `X`: exactly one solution, and every
    /// matrix in the Jacobian enclosure is nonsingular.
    Interior(IntervalBox),
    /// Neither; `K(X) ∩ X` still contains every solution in `X`.
    Contracted(IntervalBox),
    /// The operator could not be formed (unbounded enclosures or a singular
    /// floating-point preconditioner).
    Undefined,
}

/// `K(X) = m - Y f(m) + (I - Y J(X)) (X - m)`, with `Y` the floating-point
/// inverse of the midpoint of `J(X)`, used as an exact point matrix.
pub(crate) fn krawczyk(sys: &KhovanskiiSystem, x: &IntervalBox, prec: u32) -> Step {
    let n = sys.n();
    let layout = sys.layout();
    let Some(m) = x.midpoint() else { return Step::Undefined };
    let mbox = IntervalBox::new(m.iter().cloned().map(Interval::point).collect());
    let mut fm = Vec::with_capacity(n);
    for f in sys.equations() {
        let v = eval_poly(f, layout, &mbox, prec).expect("layout matches box");
        if !v.is_finite() {
            return Step::Undefined;
        }
        fm.push(v);
    }
    let mut jx = vec![Vec::with_capacity(n); n];
    for (i, row) in sys.jacobian().iter().enumerate() {
        for entry in row {
            let v = eval_poly(entry, layout, x, prec).expect("layout matches box");
            if !v.is_finite() {
                return Step::Undefined;
            }
            jx[i].push(v);
        }
    }
    let mid: Vec<Vec<f64>> = jx.iter().map(|r| r.iter().map(|v| v.mid().expect("finite").to_f64()).collect()).collect();
    let Some(yf) = invert(&mid) else { return Step::Undefined };
    let mut y = vec![Vec::with_capacity(n); n];
    for (i, row) in yf.iter().enumerate() {
        for &v in row {
            match Dyadic::from_f64(v) {
                Some(d) => y[i].push(Interval::point(d)),
                None => return Step::Undefined,
            }
        }
    }
    let dx: Vec<Interval> = (0..n).map(|k| x.get(k).sub(&Interval::point(m[k].clone()), prec)).collect();
    let mut k = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Interval::point(m[i].clone());
        for j in 0..n {
            acc = acc.sub(&y[i][j].mul(&fm[j], prec), prec);
        }
        for (kk, dxk) in dx.iter().enumerate() {
            let mut c = if i == kk { Interval::one() } else { Interval::zero() };
            for j in 0..n {
                c = c.sub(&y[i][j].mul(&jx[j][kk], prec), prec);
            }
            acc = acc.add(&c.mul(dxk, prec), prec);
        }
        k.push(acc);
    }
    let k = IntervalBox::new(k);
    if k.interior_of(x) {
        return Step::Interior(k);
    }
    match k.intersect(x) {
        None => Step::Empty,
        Some(kx) => Step::Contracted(kx),
    }
}

/// Gauss-Jordan inverse with partial pivoting; `None` if (numerically)
/// singular or non-finite.
pub(crate) fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if !scale.is_finite() || scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))?;
        if m[piv][col].abs() <= scale * 1e-15 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    let pivot = m[col].clone();
                    for (x, t) in m[r].iter_mut().zip(pivot) {
                        *x -= f * t;
                    }
                }
            }
        }
    }
    let inv: Vec<Vec<f64>> = m.into_iter().map(|r| r[n..].to_vec()).collect();
    inv.iter().flatten().all(|v| v.is_finite()).then_some(inv)
}
