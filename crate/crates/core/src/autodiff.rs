//! Reverse-mode automatic differentiation on a per-call tape.
//!
//! The loss terms are scalar functions of a few dozen predicted parameters,
//! evaluated through rotation math and forward kinematics. A small two-parent
//! tape is enough: every recorded operation stores at most two (parent, partial)
//! pairs, and one reverse sweep yields the gradient with respect to every leaf.
//!
//! [`Real`] abstracts over plain `f64` and taped [`Var`] so the kinematics code
//! is written once and instantiated for both plain evaluation and gradients.

use std::cell::RefCell;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Sentinel parent index used for constants and absent parents.
const NONE: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Node {
    parents: [(u32, f64); 2],
}

/// Gradient tape. Create one per differentiated evaluation.
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            nodes: RefCell::new(Vec::with_capacity(256)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records a differentiable leaf (an input the gradient is taken with
    /// respect to).
    pub fn var(&self, value: f64) -> Var<'_> {
        let idx = self.push(Node {
            parents: [(NONE, 0.0), (NONE, 0.0)],
        });
        Var {
            tape: self,
            idx,
            value,
        }
    }

    /// A constant: participates in arithmetic but receives no adjoint.
    pub fn constant(&self, value: f64) -> Var<'_> {
        Var {
            tape: self,
            idx: NONE,
            value,
        }
    }

    fn push(&self, node: Node) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len() as u32;
        nodes.push(node);
        idx
    }

    fn unary(&self, p: &Var<'_>, partial: f64, value: f64) -> Var<'_> {
        let idx = if p.idx == NONE {
            NONE
        } else {
            self.push(Node {
                parents: [(p.idx, partial), (NONE, 0.0)],
            })
        };
        Var {
            tape: self,
            idx,
            value,
        }
    }

    fn binary(&self, a: &Var<'_>, da: f64, b: &Var<'_>, db: f64, value: f64) -> Var<'_> {
        let idx = if a.idx == NONE && b.idx == NONE {
            NONE
        } else {
            self.push(Node {
                parents: [(a.idx, da), (b.idx, db)],
            })
        };
        Var {
            tape: self,
            idx,
            value,
        }
    }

    /// Reverse sweep from `output`. Returns adjoints addressable by [`Var`].
    pub fn gradient(&self, output: Var<'_>) -> Gradients {
        let nodes = self.nodes.borrow();
        let mut adjoint = vec![0.0; nodes.len()];
        if output.idx != NONE {
            adjoint[output.idx as usize] = 1.0;
            for i in (0..=output.idx as usize).rev() {
                let a = adjoint[i];
                if a == 0.0 {
                    continue;
                }
                for (p, partial) in nodes[i].parents {
                    if p != NONE {
                        adjoint[p as usize] += a * partial;
                    }
                }
            }
        }
        Gradients { adjoint }
    }
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

/// Adjoints produced by [`Tape::gradient`].
pub struct Gradients {
    adjoint: Vec<f64>,
}

impl Gradients {
    /// d(output)/d(var). Zero for constants and untouched leaves.
    pub fn wrt(&self, var: Var<'_>) -> f64 {
        if var.idx == NONE {
            0.0
        } else {
            self.adjoint[var.idx as usize]
        }
    }
}

/// A value recorded on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    idx: u32,
    value: f64,
}

impl<'t> Var<'t> {
    pub fn value(self) -> f64 {
        self.value
    }

    pub fn sin(self) -> Self {
        self.tape.unary(&self, self.value.cos(), self.value.sin())
    }

    pub fn cos(self) -> Self {
        self.tape.unary(&self, -self.value.sin(), self.value.cos())
    }

    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.tape.unary(&self, 0.5 / r, r)
    }

    /// Subgradient 0 at the origin.
    pub fn abs(self) -> Self {
        let s = if self.value > 0.0 {
            1.0
        } else if self.value < 0.0 {
            -1.0
        } else {
            0.0
        };
        self.tape.unary(&self, s, self.value.abs())
    }

    pub fn atan2(self, x: Var<'t>) -> Self {
        let d = self.value * self.value + x.value * x.value;
        self.tape.binary(
            &self,
            x.value / d,
            &x,
            -self.value / d,
            self.value.atan2(x.value),
        )
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Self) -> Self {
        self.tape.binary(&self, 1.0, &rhs, 1.0, self.value + rhs.value)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Self) -> Self {
        self.tape
            .binary(&self, 1.0, &rhs, -1.0, self.value - rhs.value)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Self) -> Self {
        self.tape
            .binary(&self, rhs.value, &rhs, self.value, self.value * rhs.value)
    }
}

impl<'t> Div for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: Self) -> Self {
        let v = self.value / rhs.value;
        self.tape
            .binary(&self, 1.0 / rhs.value, &rhs, -v / rhs.value, v)
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Self {
        self.tape.unary(&self, -1.0, -self.value)
    }
}

/// Scalar abstraction shared by plain evaluation and taped evaluation.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant in the same evaluation context as `self`.
    fn lift(self, c: f64) -> Self;
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn atan2(self, x: Self) -> Self;

    fn scale(self, k: f64) -> Self {
        self * self.lift(k)
    }
}

impl Real for f64 {
    fn lift(self, c: f64) -> Self {
        c
    }
    fn value(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

impl<'t> Real for Var<'t> {
    fn lift(self, c: f64) -> Self {
        self.tape.constant(c)
    }
    fn value(self) -> f64 {
        Var::value(self)
    }
    fn sin(self) -> Self {
        Var::sin(self)
    }
    fn cos(self) -> Self {
        Var::cos(self)
    }
    fn sqrt(self) -> Self {
        Var::sqrt(self)
    }
    fn abs(self) -> Self {
        Var::abs(self)
    }
    fn atan2(self, x: Self) -> Self {
        Var::atan2(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_diff(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn gradient_of_product_and_sum() {
        let tape = Tape::new();
        let x = tape.var(3.0);
        let y = tape.var(-2.0);
        let z = x * y + x; // dz/dx = y + 1, dz/dy = x
        let g = tape.gradient(z);
        assert_eq!(g.wrt(x), -1.0);
        assert_eq!(g.wrt(y), 3.0);
        assert_eq!(z.value(), -3.0);
    }

    #[test]
    fn constants_receive_no_adjoint() {
        let tape = Tape::new();
        let x = tape.var(2.0);
        let c = tape.constant(5.0);
        let z = x * c + c;
        let g = tape.gradient(z);
        assert_eq!(g.wrt(x), 5.0);
        assert_eq!(g.wrt(c), 0.0);
        assert_eq!(z.value(), 15.0);
    }

    #[test]
    fn elementary_functions_match_finite_differences() {
        let cases: [(fn(Var) -> Var, fn(f64) -> f64, f64); 5] = [
            (|v| v.sin(), f64::sin, 0.7),
            (|v| v.cos(), f64::cos, -0.4),
            (|v| v.sqrt(), f64::sqrt, 2.3),
            (|v| v.abs(), f64::abs, -1.2),
            (|v| v * v * v, |x| x * x * x, 0.9),
        ];
        for (taped, plain, x0) in cases {
            let tape = Tape::new();
            let x = tape.var(x0);
            let y = taped(x);
            let g = tape.gradient(y);
            let fd = finite_diff(plain, x0);
            assert!(
                (g.wrt(x) - fd).abs() < 1e-8,
                "grad {} vs fd {}",
                g.wrt(x),
                fd
            );
        }
    }

    #[test]
    fn atan2_partials() {
        let tape = Tape::new();
        let y = tape.var(0.3);
        let x = tape.var(-1.1);
        let a = y.atan2(x);
        let g = tape.gradient(a);
        let fdy = finite_diff(|v| v.atan2(-1.1), 0.3);
        let fdx = finite_diff(|v| 0.3f64.atan2(v), -1.1);
        assert!((g.wrt(y) - fdy).abs() < 1e-8);
        assert!((g.wrt(x) - fdx).abs() < 1e-8);
    }

    #[test]
    fn division_chain() {
        let tape = Tape::new();
        let x = tape.var(1.7);
        let y = (x * x + x.lift(1.0)) / x;
        let g = tape.gradient(y);
        let fd = finite_diff(|v| (v * v + 1.0) / v, 1.7);
        assert!((g.wrt(x) - fd).abs() < 1e-8);
    }

    #[test]
    fn fan_out_accumulates() {
        // y = x*x + x*x uses x four times; adjoints must accumulate.
        let tape = Tape::new();
        let x = tape.var(2.0);
        let y = x * x + x * x;
        let g = tape.gradient(y);
        assert_eq!(g.wrt(x), 8.0);
    }

    #[test]
    fn generic_code_agrees_between_f64_and_var() {
        fn poly<R: Real>(x: R) -> R {
            let c = x.lift(0.5);
            (x.sin() * x + c).sqrt().atan2(x.cos())
        }
        let x0 = 0.83;
        let plain = poly(x0);
        let tape = Tape::new();
        let x = tape.var(x0);
        let taped = poly(x);
        assert_eq!(plain, taped.value());
        let g = tape.gradient(taped);
        let fd = finite_diff(poly::<f64>, x0);
        assert!((g.wrt(x) - fd).abs() < 1e-8);
    }
}
