//! Type-2 and cotype-2 ratios of finite vector families, the Kwapień product
//! bound, and the Carathéodory cone reduction.

mod cone;
mod oracle;
mod ratio;

pub use cone::{caratheodory_reduce, flm_reduce, flm_reduce_traced, ConeReduction, FlmReduction};
pub use oracle::{NormKind, RootRat, SpaceOracle};
pub use ratio::{
    c2_lower_from_witness, gaussian_ratio, kwapien_upper, paired_gaussian_ratios, rademacher_ratio,
    C2Lower, EstimateMode, PairedEstimate, RatioEstimate, RatioKind, RADEMACHER_CAP,
};

use crate::error::{Error, Result};

/// Coordinates of a family: exact (`±√q` per entry) or floating point.
#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    Exact(Vec<Vec<RootRat>>),
    Float(Vec<Vec<f64>>),
}

/// A finite list of vectors of the oracle's dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    pub coords: Coords,
    pub space: SpaceOracle,
}

impl VectorFamily {
    pub fn exact(vectors: Vec<Vec<RootRat>>, space: SpaceOracle) -> Result<Self> {
        for v in &vectors {
            check_dim(v.len(), space.dim)?;
        }
        Ok(VectorFamily { coords: Coords::Exact(vectors), space })
    }

    pub fn rational(vectors: Vec<Vec<crate::seqvec::Rat>>, space: SpaceOracle) -> Result<Self> {
        let vectors = vectors
            .into_iter()
            .map(|v| v.into_iter().map(RootRat::from_rat).collect())
            .collect();
        Self::exact(vectors, space)
    }

    pub fn float(vectors: Vec<Vec<f64>>, space: SpaceOracle) -> Result<Self> {
        for v in &vectors {
            check_dim(v.len(), space.dim)?;
        }
        Ok(VectorFamily { coords: Coords::Float(vectors), space })
    }

    pub fn len(&self) -> usize {
        match &self.coords {
            Coords::Exact(v) => v.len(),
            Coords::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        match &self.coords {
            Coords::Exact(v) => v.iter().map(|x| x.iter().map(RootRat::to_f64).collect()).collect(),
            Coords::Float(v) => v.clone(),
        }
    }
}

fn check_dim(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
