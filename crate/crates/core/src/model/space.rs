use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned box of integer vectors `min[n] ..= max[n]`.
///
/// Elements are numbered in lexicographic order with server 0 as the most
/// significant coordinate, so index 0 is `min` and the last index is `max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntBox {
    min: Vec<i64>,
    max: Vec<i64>,
    strides: Vec<usize>,
    cardinality: usize,
}

impl IntBox {
    pub fn new(min: Vec<i64>, max: Vec<i64>) -> Result<Self> {
        if min.is_empty() {
            return Err(Error::InvalidSpace("at least one server is required".into()));
        }
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                got: max.len(),
            });
        }
        let mut strides = vec![0usize; min.len()];
        let mut cardinality: usize = 1;
        for n in (0..min.len()).rev() {
            if min[n] > max[n] {
                return Err(Error::InvalidSpace(format!(
                    "server {n}: lower bound {} exceeds upper bound {}",
                    min[n], max[n]
                )));
            }
            strides[n] = cardinality;
            let width = usize::try_from(max[n] - min[n] + 1)
                .map_err(|_| Error::InvalidSpace(format!("server {n}: range too wide")))?;
            cardinality = cardinality
                .checked_mul(width)
                .ok_or_else(|| Error::InvalidSpace("space cardinality overflows".into()))?;
        }
        Ok(Self {
            min,
            max,
            strides,
            cardinality,
        })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &[i64] {
        &self.min
    }

    pub fn max(&self) -> &[i64] {
        &self.max
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn contains(&self, values: &[i64]) -> bool {
        values.len() == self.dim()
            && values
                .iter()
                .zip(self.min.iter().zip(&self.max))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn encode(&self, values: &[i64]) -> Result<usize> {
        if values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: values.len(),
            });
        }
        if !self.contains(values) {
            return Err(Error::OutOfBounds {
                values: values.to_vec(),
            });
        }
        Ok(values
            .iter()
            .zip(&self.min)
            .zip(&self.strides)
            .map(|((v, lo), stride)| (v - lo) as usize * stride)
            .sum())
    }

    pub fn decode(&self, index: usize) -> Result<Vec<i64>> {
        if index >= self.cardinality {
            return Err(Error::IndexOutOfRange {
                index,
                cardinality: self.cardinality,
            });
        }
        let mut rest = index;
        Ok(self
            .strides
            .iter()
            .zip(&self.min)
            .map(|(stride, lo)| {
                let digit = rest / stride;
                rest %= stride;
                lo + digit as i64
            })
            .collect())
    }

    /// All elements in index order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.cardinality).map(move |k| self.decode(k).expect("index below cardinality"))
    }
}

/// Reservation levels chosen by the operator, one per server.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReservationVector(pub Vec<i64>);

/// Job requests observed in one slot, one count per server.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequestVector(pub Vec<i64>);

impl ReservationVector {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl RequestVector {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

/// Finite set of reservation vectors; each server `n` can reserve between
/// `min_reservation[n]` and its capacity `max_reservation[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    grid: IntBox,
}

impl ActionSpace {
    pub fn new(min_reservation: Vec<i64>, max_reservation: Vec<i64>) -> Result<Self> {
        if let Some(n) = min_reservation.iter().position(|&v| v < 1) {
            return Err(Error::InvalidSpace(format!(
                "server {n}: minimum reservation must be at least 1"
            )));
        }
        Ok(Self {
            grid: IntBox::new(min_reservation, max_reservation)?,
        })
    }

    /// Every server reserves between `lo` and `hi` units.
    pub fn uniform(servers: usize, lo: i64, hi: i64) -> Result<Self> {
        Self::new(vec![lo; servers], vec![hi; servers])
    }

    pub fn n_servers(&self) -> usize {
        self.grid.dim()
    }

    pub fn min_reservation(&self) -> &[i64] {
        self.grid.min()
    }

    pub fn max_reservation(&self) -> &[i64] {
        self.grid.max()
    }

    pub fn cardinality(&self) -> usize {
        self.grid.cardinality()
    }

    pub fn grid(&self) -> &IntBox {
        &self.grid
    }

    pub fn encode(&self, a: &ReservationVector) -> Result<usize> {
        self.grid.encode(&a.0)
    }

    pub fn decode(&self, index: usize) -> Result<ReservationVector> {
        self.grid.decode(index).map(ReservationVector)
    }

    pub fn contains(&self, a: &ReservationVector) -> bool {
        self.grid.contains(&a.0)
    }

    pub fn actions(&self) -> impl Iterator<Item = ReservationVector> + '_ {
        self.grid.iter().map(ReservationVector)
    }
}

/// Per-server request bounds. `max` may be left open, in which case the
/// request space is unbounded and no uniform cost bound exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestBounds {
    pub min: Vec<i64>,
    pub max: Option<Vec<i64>>,
}

impl RequestBounds {
    pub fn new(min: Vec<i64>, max: Option<Vec<i64>>) -> Result<Self> {
        if let Some(n) = min.iter().position(|&v| v < 0) {
            return Err(Error::InvalidSpace(format!(
                "server {n}: request minimum must be nonnegative"
            )));
        }
        let bounds = Self { min, max };
        if bounds.max.is_some() {
            bounds.grid()?;
        }
        Ok(bounds)
    }

    /// Defaults: at least one request per server, at most the server capacity.
    pub fn for_space(space: &ActionSpace) -> Self {
        Self {
            min: vec![1; space.n_servers()],
            max: Some(space.max_reservation().to_vec()),
        }
    }

    pub fn grid(&self) -> Result<IntBox> {
        let max = self.max.clone().ok_or(Error::UnboundedRequests)?;
        IntBox::new(self.min.clone(), max)
    }

    pub fn contains(&self, b: &RequestVector) -> bool {
        b.0.len() == self.min.len()
            && b.0.iter().zip(&self.min).all(|(v, lo)| v >= lo)
            && self
                .max
                .as_ref()
                .is_none_or(|max| b.0.iter().zip(max).all(|(v, hi)| v <= hi))
    }
}
