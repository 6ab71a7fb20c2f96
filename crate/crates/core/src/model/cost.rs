use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Univariate polynomial `c0 + c1 x + c2 x^2 + ...` with nonnegative
/// coefficients, evaluated on nonnegative integer arguments.
///
/// Nonnegative coefficients make the function nonnegative, nondecreasing and
/// convex on `x >= 0`; the transfer solver relies on the convexity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidCost(format!(
                "coefficients must be finite and nonnegative, got {c}"
            )));
        }
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `scale * x^2`, the shape used for every cost in the reference instance.
    pub fn quadratic(scale: f64) -> Result<Self> {
        Self::new(vec![0.0, 0.0, scale])
    }

    pub fn linear(scale: f64) -> Result<Self> {
        Self::new(vec![0.0, scale])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    #[inline]
    pub fn eval(&self, x: u64) -> f64 {
        let x = x as f64;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Finite-difference scan: `f(x+1) >= f(x)` on `0..=max_arg`.
    pub fn is_nondecreasing_on(&self, max_arg: u64) -> bool {
        let mut prev = self.eval(0);
        for x in 1..=max_arg {
            let next = self.eval(x);
            if next < prev {
                return false;
            }
            prev = next;
        }
        true
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

/// Reservation, violation and transfer cost families for an `N`-server
/// network. Transfer functions are stored row-major (`sender * N + receiver`);
/// the diagonal is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    n: usize,
    reservation: Vec<Polynomial>,
    violation: Vec<Polynomial>,
    transfer: Vec<Polynomial>,
}

impl CostModel {
    pub fn new(
        reservation: Vec<Polynomial>,
        violation: Vec<Polynomial>,
        transfer: Vec<Vec<Polynomial>>,
    ) -> Result<Self> {
        let n = reservation.len();
        if n == 0 {
            return Err(Error::InvalidCost("no servers".into()));
        }
        if violation.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: violation.len(),
            });
        }
        if transfer.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: transfer.len(),
            });
        }
        for (k, f) in violation.iter().enumerate() {
            if f.constant_term() != 0.0 {
                return Err(Error::InvalidCost(format!(
                    "violation cost of server {k} must vanish at 0"
                )));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for (row, fns) in transfer.into_iter().enumerate() {
            if fns.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: fns.len(),
                });
            }
            for (col, f) in fns.into_iter().enumerate() {
                if row == col {
                    flat.push(Polynomial::zero());
                    continue;
                }
                if f.constant_term() != 0.0 {
                    return Err(Error::InvalidCost(format!(
                        "transfer cost {row}->{col} must vanish at 0"
                    )));
                }
                flat.push(f);
            }
        }
        Ok(Self {
            n,
            reservation,
            violation,
            transfer: flat,
        })
    }

    /// Same functions at every server and on every link.
    pub fn homogeneous(
        n: usize,
        reservation: Polynomial,
        violation: Polynomial,
        transfer: Polynomial,
    ) -> Result<Self> {
        Self::new(
            vec![reservation; n],
            vec![violation; n],
            vec![vec![transfer; n]; n],
        )
    }

    pub fn zero(n: usize) -> Self {
        Self::homogeneous(n, Polynomial::zero(), Polynomial::zero(), Polynomial::zero())
            .expect("zero model is valid")
    }

    pub fn n_servers(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn reservation_fn(&self, n: usize) -> &Polynomial {
        &self.reservation[n]
    }

    #[inline]
    pub fn violation_fn(&self, n: usize) -> &Polynomial {
        &self.violation[n]
    }

    #[inline]
    pub fn transfer_fn(&self, from: usize, to: usize) -> &Polynomial {
        &self.transfer[from * self.n + to]
    }

    /// Coefficient lists in the config layout (`transfer[from][to]`).
    pub fn coefficients(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) {
        let list = |fs: &[Polynomial]| fs.iter().map(|f| f.coeffs().to_vec()).collect();
        let transfer = self
            .transfer
            .chunks(self.n)
            .map(|row| row.iter().map(|f| f.coeffs().to_vec()).collect())
            .collect();
        (list(&self.reservation), list(&self.violation), transfer)
    }

    /// Checks every function is nondecreasing on `0..=max_arg` by finite
    /// differences.
    pub fn check_monotone(&self, max_arg: u64) -> Result<()> {
        let all = self
            .reservation
            .iter()
            .chain(&self.violation)
            .chain(&self.transfer);
        match all.clone().position(|f| !f.is_nondecreasing_on(max_arg)) {
            Some(k) => Err(Error::InvalidCost(format!(
                "cost function #{k} decreases on [0, {max_arg}]"
            ))),
            None => Ok(()),
        }
    }
}
