use crate::algebra::Field;
use crate::error::{Error, Result};

/// What an ROABP hitting-set generator is asked for: a point set on `n`
/// coordinates hitting every nonzero ROABP of width `2^{log2_width}` and
/// individual degree `degree` in a known reading order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoabpGeneratorSpec {
    pub n: usize,
    pub log2_width: f64,
    pub degree: usize,
}

/// A source of ROABP hitting sets.
///
/// Implementations must be deterministic: equal specs give equal outputs.
pub trait RoabpBackend: Send + Sync {
    fn name(&self) -> &str;

    /// Points (each of length `spec.n`) hitting every nonzero ROABP allowed
    /// by `spec`.
    fn hitting_set(&self, field: &Field, spec: &RoabpGeneratorSpec) -> Result<Vec<Vec<u64>>>;

    /// If every output for this degree is the full grid over a fixed value
    /// set, that set. Lets callers stop unions early once saturated.
    fn alphabet(&self, _degree: usize) -> Option<Vec<u64>> {
        None
    }
}

/// The full grid `{0, …, d}^n`: exact for every polynomial of individual
/// degree at most `d`, whatever its width.
#[derive(Clone, Debug)]
pub struct GridBackend {
    pub max_points: usize,
}

impl Default for GridBackend {
    fn default() -> Self {
        Self {
            max_points: 1 << 22,
        }
    }
}

impl GridBackend {
    pub fn new(max_points: usize) -> Self {
        Self { max_points }
    }
}

impl RoabpBackend for GridBackend {
    fn name(&self) -> &str {
        "grid"
    }

    fn hitting_set(&self, field: &Field, spec: &RoabpGeneratorSpec) -> Result<Vec<Vec<u64>>> {
        let base = spec.degree + 1;
        if (base as u64) > field.modulus() {
            return Err(Error::Parameter(format!(
                "grid of {base} values does not fit in F_{}",
                field.modulus()
            )));
        }
        let needed = (base as f64).powi(spec.n as i32);
        if needed > self.max_points as f64 {
            return Err(Error::Budget {
                what: format!(
                    "grid ROABP hitting set on {} variables (shrink the bucket or raise --max-points)",
                    spec.n
                ),
                needed,
                budget: self.max_points as f64,
            });
        }
        Ok(grid_points(spec.n, spec.degree))
    }

    fn alphabet(&self, degree: usize) -> Option<Vec<u64>> {
        Some((0..=degree as u64).collect())
    }
}

/// `{0, …, d}^n` in lexicographic order.
pub fn grid_points(n: usize, d: usize) -> Vec<Vec<u64>> {
    let base = d as u64 + 1;
    let mut out = Vec::with_capacity((base as usize).saturating_pow(n as u32));
    let mut cur = vec![0u64; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < base {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// The hitting set `backend` produces for `spec`.
pub fn roabp_hitting_set(
    backend: &dyn RoabpBackend,
    field: &Field,
    spec: &RoabpGeneratorSpec,
) -> Result<Vec<Vec<u64>>> {
    backend.hitting_set(field, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(
            grid_points(2, 1),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(grid_points(3, 2).len(), 27);
        assert_eq!(grid_points(0, 1), vec![Vec::<u64>::new()]);
    }

    #[test]
    fn grid_budget() {
        let b = GridBackend::new(8);
        let spec = RoabpGeneratorSpec {
            n: 4,
            log2_width: 1.0,
            degree: 1,
        };
        assert!(matches!(
            b.hitting_set(&Field::default(), &spec),
            Err(Error::Budget { .. })
        ));
    }
}
