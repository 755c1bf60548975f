//! Built-in example lattices.
//!
//! `Y1 = T^6 / (Z/4)` with `κ(z1, z2, z3) = (-z1, i z2, i z3)`, so
//! `M = (M1)² ⊕ (M2)²`: `M1` is the sign lattice and `M2` is `Z²` with
//! `κ(x) = -y`, `κ(y) = x`.
//!
//! `Y2 = T^6 / (Z/2)²` with `σ1 = (-z1, -z2, z3)`, `σ2 = (-z1, z2, -z3)`, so
//! `M = (L1)² ⊕ (L2)² ⊕ (L3)²` for the three nontrivial sign characters.

use std::sync::Arc;

use crate::group::{FiniteMatrixGroup, DEFAULT_BOUND};
use crate::lattice::ZGLattice;
use crate::linalg::{FinAbGroup, IntMatrix};
use crate::orbifold::OrbifoldModel;

fn mat<R: AsRef<[i64]>>(rows: &[R]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn diag(d: &[i64]) -> IntMatrix {
    IntMatrix::diagonal(d.len(), d.len(), d.iter().map(|&x| x.into()))
}

fn model_from(name: &str, generators: Vec<IntMatrix>) -> OrbifoldModel {
    let group = Arc::new(FiniteMatrixGroup::enumerate(&generators, DEFAULT_BOUND).expect("finite"));
    OrbifoldModel::named(name, ZGLattice::natural(group))
}

/// `κ(x) = -y, κ(y) = x` on row vectors.
pub fn rotation() -> IntMatrix {
    mat(&[[0, -1], [1, 0]])
}

pub fn y1_generators() -> Vec<IntMatrix> {
    let m1 = mat(&[[-1]]);
    vec![IntMatrix::block_diagonal(&[m1.clone(), m1, rotation(), rotation()])]
}

pub fn y2_generators() -> Vec<IntMatrix> {
    vec![
        diag(&[-1, -1, -1, -1, 1, 1]),
        diag(&[-1, -1, 1, 1, -1, -1]),
    ]
}

pub fn y1() -> OrbifoldModel {
    model_from("Y1", y1_generators())
}

pub fn y2() -> OrbifoldModel {
    model_from("Y2", y2_generators())
}

pub fn builtin(name: &str) -> Option<OrbifoldModel> {
    match name {
        "Y1" | "y1" => Some(y1()),
        "Y2" | "y2" => Some(y2()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 2] = ["Y1", "Y2"];

/// `Z/4 = ⟨rotation⟩` and the coefficient modules `Z`, `M1`, `M2`, `P`, where
/// `P` is the regular representation of `Z/2` inflated to `Z/4`.
pub fn z4_coefficient_modules() -> Vec<(&'static str, ZGLattice)> {
    let g = Arc::new(FiniteMatrixGroup::enumerate(&[rotation()], DEFAULT_BOUND).expect("finite"));
    let build = |img: IntMatrix| ZGLattice::from_generator_images(g.clone(), &[img]).expect("homomorphism");
    vec![
        ("Z", ZGLattice::trivial(g.clone(), 1)),
        ("M1", build(mat(&[[-1]]))),
        ("M2", ZGLattice::natural(g.clone())),
        ("P", build(mat(&[[0, 1], [1, 0]]))),
    ]
}

/// `Z² × Z/2`: the order-two group acting trivially on `Z²`.
pub fn brown_trivial_model() -> OrbifoldModel {
    let g = Arc::new(FiniteMatrixGroup::enumerate(&[mat(&[[-1]])], DEFAULT_BOUND).expect("finite"));
    let lattice = ZGLattice::from_generator_images(g, &[IntMatrix::identity(2)]).expect("homomorphism");
    OrbifoldModel::named("Z2xZ/2", lattice)
}

/// `Z² ⋊ Z/4` with the generator acting by `-I`.
pub fn brown_rotation_model() -> OrbifoldModel {
    let g = Arc::new(FiniteMatrixGroup::enumerate(&[rotation()], DEFAULT_BOUND).expect("finite"));
    let lattice = ZGLattice::from_generator_images(g, &[diag(&[-1, -1])]).expect("homomorphism");
    OrbifoldModel::named("Z2:Z/4", lattice)
}

/// Values in circulation for a built-in model.
#[derive(Clone, Debug)]
pub struct RecordedValues {
    pub name: &'static str,
    pub integral: &'static [&'static str],
}

impl RecordedValues {
    pub fn integral(&self, k: usize) -> Option<FinAbGroup> {
        self.integral.get(k).map(|s| s.parse().expect("well-formed"))
    }

    /// Recorded `H^k` for `k ∈ {2, 3}`.
    pub fn printed_differences(&self) -> Vec<(usize, FinAbGroup)> {
        (2..=3).filter_map(|k| self.integral(k).map(|g| (k, g))).collect()
    }
}

pub const Y1_TABLE: [&str; 9] = [
    "Z",
    "0",
    "Z^5 + Z/4 + (Z/2)^4",
    "Z^4 + (Z/2)^4",
    "Z^5 + (Z/4)^4 + (Z/2)^14",
    "(Z/2)^12",
    "Z + (Z/4)^7 + (Z/2)^20",
    "(Z/2)^12",
    "(Z/4)^8 + (Z/2)^20",
];

/// The widely quoted `Y2` table; degrees 2 and 3 omit `H²(G, Z)` and
/// `H³(G, Z)` respectively.
pub const Y2_PRINTED: [&str; 4] = ["Z", "0", "Z^3 + (Z/2)^6", "Z^8 + (Z/2)^18"];

pub fn recorded_values(model: &OrbifoldModel) -> Option<RecordedValues> {
    if model.same_action(&y1()) {
        Some(RecordedValues {
            name: "Y1",
            integral: &Y1_TABLE,
        })
    } else if model.same_action(&y2()) {
        Some(RecordedValues {
            name: "Y2",
            integral: &Y2_PRINTED,
        })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(y1().group_order(), 4);
        assert_eq!(y2().group_order(), 4);
        assert!(y1().lattice.group().cyclic_generator().is_some());
        assert!(y2().lattice.group().cyclic_generator().is_none());
    }
}
