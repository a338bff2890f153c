//! Barrier potentials: a piecewise description of V(x) on [0, L] plus the
//! flat levels of the incident (left) and transmitted (right) regions.

mod dsl;
pub mod expr;

use serde::Serialize;

pub use dsl::{parse_potential, render_potential};
pub use expr::Expr;

use crate::error::{Error, Result};
use expr::BinOp;

/// Relative tolerance (in units of L) for joining adjacent segment endpoints.
pub const COVERAGE_TOLERANCE: f64 = 1e-12;

/// Number of points per segment checked for finiteness at construction.
const VALIDATION_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentForm {
    Constant(f64),
    /// Coefficients `c0 + c1 x + c2 x² + ...` in absolute position x.
    Polynomial(Vec<f64>),
    Expression(Expr),
}

impl SegmentForm {
    fn eval(&self, x: f64) -> f64 {
        match self {
            SegmentForm::Constant(v) => *v,
            SegmentForm::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
            SegmentForm::Expression(e) => e.eval(x),
        }
    }

    /// The same function written as an expression tree.
    pub fn to_expr(&self) -> Expr {
        match self {
            SegmentForm::Constant(v) => Expr::Num(*v),
            SegmentForm::Expression(e) => e.clone(),
            SegmentForm::Polynomial(c) => {
                let mut terms = c.iter().enumerate().filter(|(_, &ci)| ci != 0.0).map(|(i, &ci)| {
                    match i {
                        0 => Expr::Num(ci),
                        1 => Expr::Bin(BinOp::Mul, Box::new(Expr::Num(ci)), Box::new(Expr::X)),
                        _ => Expr::Bin(
                            BinOp::Mul,
                            Box::new(Expr::Num(ci)),
                            Box::new(Expr::Bin(
                                BinOp::Pow,
                                Box::new(Expr::X),
                                Box::new(Expr::Num(i as f64)),
                            )),
                        ),
                    }
                });
                let first = terms.next().unwrap_or(Expr::Num(0.0));
                terms.fold(first, |acc, t| Expr::Bin(BinOp::Add, Box::new(acc), Box::new(t)))
            }
        }
    }
}

/// One piece of the barrier on the half-open interval `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub form: SegmentForm,
}

impl Segment {
    pub fn new(start: f64, end: f64, form: SegmentForm) -> Self {
        Segment { start, end, form }
    }

    pub fn constant(start: f64, end: f64, value: f64) -> Self {
        Self::new(start, end, SegmentForm::Constant(value))
    }

    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    /// This segment's formula at x, including at its own end point.
    pub fn value(&self, x: f64) -> f64 {
        self.form.eval(x)
    }
}

/// Scattering geometry: V_left for x < 0, V(x) on [0, L], V_right for x > L.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    segments: Vec<Segment>,
    v_left: f64,
    v_right: f64,
}

impl Potential {
    /// Validates coverage of [0, L] and finiteness of every segment.
    pub fn new(segments: Vec<Segment>, v_left: f64, v_right: f64) -> Result<Self> {
        let Some(last) = segments.last() else {
            return Err(Error::Coverage("no segments".into()));
        };
        let length = last.end;
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Coverage(format!("barrier length must be positive, got {length}")));
        }
        let tol = COVERAGE_TOLERANCE * length;
        if segments[0].start.abs() > tol {
            return Err(Error::Coverage(format!(
                "gap: first segment starts at {} instead of 0",
                segments[0].start
            )));
        }
        for s in &segments {
            if !(s.start.is_finite() && s.end.is_finite() && s.start < s.end) {
                return Err(Error::Coverage(format!(
                    "segment [{}, {}) is empty or reversed",
                    s.start, s.end
                )));
            }
        }
        for pair in segments.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let mismatch = b.start - a.end;
            if mismatch > tol {
                return Err(Error::Coverage(format!("gap between {} and {}", a.end, b.start)));
            }
            if mismatch < -tol {
                return Err(Error::Coverage(format!(
                    "overlap: segment starting at {} begins before {}",
                    b.start, a.end
                )));
            }
        }
        if !(v_left.is_finite() && v_right.is_finite()) {
            return Err(Error::InvalidArgument("exterior levels must be finite".into()));
        }
        let potential = Potential {
            segments,
            v_left,
            v_right,
        };
        let count = potential.segments.len();
        for (i, s) in potential.segments.iter().enumerate() {
            let last_samples = if i + 1 == count { 1 } else { 0 };
            for j in 0..VALIDATION_SAMPLES + last_samples {
                let x = s.start + s.width() * j as f64 / VALIDATION_SAMPLES as f64;
                if !s.form.eval(x).is_finite() {
                    return Err(Error::NonFinite { x });
                }
            }
        }
        Ok(potential)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Barrier length L in nm.
    pub fn length(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    pub fn v_left(&self) -> f64 {
        self.v_left
    }

    pub fn v_right(&self) -> f64 {
        self.v_right
    }

    /// V(x) for 0 ≤ x ≤ L. At a segment boundary the right-hand segment wins;
    /// x = L belongs to the last segment.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let length = self.length();
        if !(0.0..=length).contains(&x) {
            return Err(Error::Domain { x, length });
        }
        Ok(self.value(x))
    }

    /// Evaluation without the domain check; x is clamped into [0, L].
    #[inline]
    pub(crate) fn value(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.length());
        let idx = match self.segments.len() {
            1 => 0,
            _ => self
                .segments
                .partition_point(|s| s.start <= x)
                .saturating_sub(1),
        };
        self.segments[idx].form.eval(x)
    }

    /// Left limit of V at x (the segment ending at x wins at a boundary).
    pub(crate) fn value_left(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.length());
        let idx = self
            .segments
            .partition_point(|s| s.start < x)
            .saturating_sub(1);
        self.segments[idx].form.eval(x)
    }

    /// Largest of V_left, V_right and V sampled at `samples + 1` uniform points.
    pub fn sampled_max(&self, samples: usize) -> f64 {
        let l = self.length();
        let n = samples.max(1);
        (0..=n)
            .map(|i| self.value(l * i as f64 / n as f64))
            .fold(self.v_left.max(self.v_right), f64::max)
    }

    /// The potential reflected through the barrier centre, x → L − x.
    pub fn mirrored(&self) -> Potential {
        let length = self.length();
        let reflected_x = Expr::Bin(BinOp::Sub, Box::new(Expr::Num(length)), Box::new(Expr::X));
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| {
                let form = match &s.form {
                    SegmentForm::Constant(v) => SegmentForm::Constant(*v),
                    other => SegmentForm::Expression(substitute_x(&other.to_expr(), &reflected_x)),
                };
                Segment::new(length - s.end, length - s.start, form)
            })
            .collect();
        Potential {
            segments,
            v_left: self.v_right,
            v_right: self.v_left,
        }
    }

    /// Flat barrier of the given height on [0, width].
    pub fn square(height: f64, width: f64) -> Result<Self> {
        Self::new(vec![Segment::constant(0.0, width, height)], 0.0, 0.0)
    }

    /// `height · ((x − w/2)/(w/2))²` on [0, w]: zero at the centre, `height` at both edges.
    pub fn parabola(height: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Coverage(format!("barrier length must be positive, got {width}")));
        }
        let curvature = 4.0 * height / (width * width);
        let coefficients = vec![height, -curvature * width, curvature];
        Self::new(
            vec![Segment::new(0.0, width, SegmentForm::Polynomial(coefficients))],
            0.0,
            0.0,
        )
    }

    /// Two flat barriers of equal height enclosing a flat well at zero.
    pub fn double_barrier(height: f64, barrier: f64, well: f64) -> Result<Self> {
        Self::new(
            vec![
                Segment::constant(0.0, barrier, height),
                Segment::constant(barrier, barrier + well, 0.0),
                Segment::constant(barrier + well, 2.0 * barrier + well, height),
            ],
            0.0,
            0.0,
        )
    }

    /// A stand-in "arbitrary" barrier for demonstrations: two smooth humps of
    /// different heights, a classically allowed dip between them, and a flat
    /// shoulder ending in a jump down to a raised exit level. The shape is an
    /// invented example and does not reproduce any published barrier.
    pub fn arbitrary() -> Self {
        let humps = Expr::parse("6*exp(-((x-0.5)/0.25)^2) + 9*exp(-((x-1.25)/0.2)^2)")
            .expect("built-in expression parses");
        Self::new(
            vec![
                Segment::new(0.0, 1.6, SegmentForm::Expression(humps)),
                Segment::constant(1.6, 2.0, 4.0),
            ],
            0.0,
            1.0,
        )
        .expect("built-in potential is valid")
    }

    pub fn with_exterior(mut self, v_left: f64, v_right: f64) -> Result<Self> {
        if !(v_left.is_finite() && v_right.is_finite()) {
            return Err(Error::InvalidArgument("exterior levels must be finite".into()));
        }
        self.v_left = v_left;
        self.v_right = v_right;
        Ok(self)
    }
}

/// V(x) = 10 (x − 1)² eV on 0 < x < 2 nm, zero outside.
pub fn builtin_parabolic() -> Potential {
    Potential::parabola(10.0, 2.0).expect("built-in potential is valid")
}

fn substitute_x(e: &Expr, replacement: &Expr) -> Expr {
    match e {
        Expr::X => replacement.clone(),
        Expr::Num(v) => Expr::Num(*v),
        Expr::Neg(a) => Expr::Neg(Box::new(substitute_x(a, replacement))),
        Expr::Bin(op, a, b) => Expr::Bin(
            *op,
            Box::new(substitute_x(a, replacement)),
            Box::new(substitute_x(b, replacement)),
        ),
        Expr::Call(f, a) => Expr::Call(*f, Box::new(substitute_x(a, replacement))),
    }
}

/// Serializable summary used in reports.
#[derive(Debug, Clone, Serialize)]
pub struct PotentialSummary {
    pub length_nm: f64,
    pub v_left_ev: f64,
    pub v_right_ev: f64,
    pub segments: usize,
    pub canonical: String,
}

impl From<&Potential> for PotentialSummary {
    fn from(p: &Potential) -> Self {
        PotentialSummary {
            length_nm: p.length(),
            v_left_ev: p.v_left(),
            v_right_ev: p.v_right(),
            segments: p.segments().len(),
            canonical: render_potential(p),
        }
    }
}
