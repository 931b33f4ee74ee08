//! Read-once oblivious algebraic branching programs.
//!
//! An [`Roabp`] reads variables in a fixed order; the edges between layer
//! `ℓ−1` and `ℓ` are labelled by univariate polynomials in the `ℓ`-th
//! variable of that order. [`Roabp::from_sparse_products`] turns a depth-4
//! formula into one of width at most `M·s^k`.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{Field, Monomial, SparseMultilinearPoly};
use crate::error::{Error, Result};
use crate::formula::Depth4Formula;

/// Largest width [`Roabp::from_sparse_products`] will build.
pub const MAX_WIDTH: usize = 1 << 22;

/// An edge `from → to` between two consecutive layers, labelled by the
/// polynomial `Σ label[e]·x^e` in the layer's variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roabp {
    field: Field,
    n: usize,
    order: Vec<usize>,
    layer_sizes: Vec<usize>,
    edges: Vec<Vec<Edge>>,
}

impl Roabp {
    /// Builds and validates a program. `layer_sizes` has one entry per
    /// layer (`order.len() + 1` of them) and starts and ends with 1, unless
    /// the program is empty (computes 0), in which case inner layers may
    /// have size 0.
    pub fn new(
        field: Field,
        n: usize,
        order: Vec<usize>,
        layer_sizes: Vec<usize>,
        edges: Vec<Vec<Edge>>,
    ) -> Result<Self> {
        check_order(&order, n)?;
        if order.is_empty() {
            return Err(Error::Precondition(
                "an ROABP reads at least one variable".into(),
            ));
        }
        if layer_sizes.len() != order.len() + 1 || edges.len() != order.len() {
            return Err(Error::Precondition(format!(
                "{} variables need {} layers and {} edge sets",
                order.len(),
                order.len() + 1,
                order.len()
            )));
        }
        if layer_sizes[0] != 1 || layer_sizes[order.len()] != 1 {
            return Err(Error::Precondition(
                "source and sink layers must have one node".into(),
            ));
        }
        for (l, layer) in edges.iter().enumerate() {
            for e in layer {
                if e.from >= layer_sizes[l] || e.to >= layer_sizes[l + 1] {
                    return Err(Error::Precondition(format!(
                        "edge {}->{} leaves layer bounds at layer {}",
                        e.from,
                        e.to,
                        l + 1
                    )));
                }
            }
        }
        Ok(Self {
            field,
            n,
            order,
            layer_sizes,
            edges,
        })
    }

    /// The program for `Φ` reading variables in `order`, with `k` and `s`
    /// measured from `Φ`.
    pub fn from_sparse_products(phi: &Depth4Formula, order: &[usize]) -> Result<Self> {
        let (s, k) = phi.sparsity_profile();
        Self::from_sparse_products_bounded(phi, order, k, s)
    }

    /// As [`Roabp::from_sparse_products`], but first checks that every gate
    /// has at most `k` factors on more than one variable and every factor
    /// has at most `s` monomials.
    ///
    /// Each gate's multi-variable factors are multiplied out into at most
    /// `s^k` monomials; each monomial times the gate's univariate factors
    /// becomes one width-1 path along `order`, and all paths run in
    /// parallel between the shared source and sink.
    pub fn from_sparse_products_bounded(
        phi: &Depth4Formula,
        order: &[usize],
        k: usize,
        s: usize,
    ) -> Result<Self> {
        let field = phi.field();
        check_order(order, phi.n())?;
        let covered: BTreeSet<usize> = order.iter().copied().collect();
        for (g, gate) in phi.gates().iter().enumerate() {
            let mut multi = 0;
            for (j, factor) in gate.iter().enumerate() {
                if factor.sparsity() > s {
                    return Err(Error::RoabpPrecondition {
                        gate: g,
                        factor: j,
                        detail: format!("sparsity {} exceeds s = {s}", factor.sparsity()),
                    });
                }
                let vars = factor.var_set();
                if vars.len() > 1 {
                    multi += 1;
                    if multi > k {
                        return Err(Error::RoabpPrecondition {
                            gate: g,
                            factor: j,
                            detail: format!("more than k = {k} factors on several variables"),
                        });
                    }
                }
                if let Some(x) = vars.iter().find(|x| !covered.contains(x)) {
                    return Err(Error::RoabpPrecondition {
                        gate: g,
                        factor: j,
                        detail: format!("x{} is missing from the reading order", x + 1),
                    });
                }
            }
        }

        let mut paths: Vec<Vec<Vec<u64>>> = Vec::new();
        for gate in phi.gates() {
            let mut scalar = 1;
            let mut univariate: Vec<(usize, [u64; 2])> = Vec::new();
            let mut expanded: Vec<(Monomial, u64)> = vec![(Monomial::one(), 1)];
            for factor in gate {
                let vars = factor.var_set();
                match vars.len() {
                    0 => scalar = field.mul(scalar, factor.as_constant().unwrap_or(0)),
                    1 => {
                        let x = *vars.iter().next().unwrap_or(&0);
                        let c0 = factor.coeff(&Monomial::one());
                        let c1 = factor.coeff(&Monomial::var(x));
                        univariate.push((x, [c0, c1]));
                    }
                    _ => {
                        let mut next = Vec::with_capacity(expanded.len() * factor.sparsity());
                        for (m, c) in &expanded {
                            for (fm, fc) in factor.terms() {
                                let prod = m.mul(fm).ok_or_else(|| {
                                    Error::Internal("gate factors share a variable".into())
                                })?;
                                next.push((prod, field.mul(*c, fc)));
                            }
                        }
                        expanded = next;
                    }
                }
                if paths.len() + expanded.len() > MAX_WIDTH {
                    return Err(Error::Budget {
                        what: "ROABP width".into(),
                        needed: (paths.len() + expanded.len()) as f64,
                        budget: MAX_WIDTH as f64,
                    });
                }
            }
            for (m, c) in expanded {
                let mut labels = Vec::with_capacity(order.len());
                for &x in order {
                    let label = if m.contains(x) {
                        vec![0, 1]
                    } else if let Some((_, coeffs)) = univariate.iter().find(|(y, _)| *y == x) {
                        coeffs.to_vec()
                    } else {
                        vec![1]
                    };
                    labels.push(label);
                }
                let lead = field.mul(scalar, c);
                if let Some(first) = labels.first_mut() {
                    first.iter_mut().for_each(|v| *v = field.mul(*v, lead));
                }
                paths.push(labels);
            }
        }
        Self::from_paths(field, phi.n(), order.to_vec(), paths)
    }

    /// Joins width-1 paths (one label per variable of `order`) in parallel.
    fn from_paths(
        field: Field,
        n: usize,
        order: Vec<usize>,
        paths: Vec<Vec<Vec<u64>>>,
    ) -> Result<Self> {
        let d = order.len();
        if d == 1 {
            let mut label: Vec<u64> = Vec::new();
            for p in &paths {
                let l = &p[0];
                if label.len() < l.len() {
                    label.resize(l.len(), 0);
                }
                for (i, &c) in l.iter().enumerate() {
                    label[i] = field.add(label[i], c);
                }
            }
            let edges = vec![vec![Edge {
                from: 0,
                to: 0,
                label,
            }]];
            return Self::new(field, n, order, vec![1, 1], edges);
        }
        let width = paths.len();
        let mut layer_sizes = vec![width; d + 1];
        layer_sizes[0] = 1;
        layer_sizes[d] = 1;
        let mut edges: Vec<Vec<Edge>> = (0..d).map(|_| Vec::with_capacity(width)).collect();
        for (i, labels) in paths.into_iter().enumerate() {
            for (l, label) in labels.into_iter().enumerate() {
                let from = if l == 0 { 0 } else { i };
                let to = if l + 1 == d { 0 } else { i };
                edges[l].push(Edge { from, to, label });
            }
        }
        Self::new(field, n, order, layer_sizes, edges)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn edges(&self) -> &[Vec<Edge>] {
        &self.edges
    }

    /// Largest layer size.
    pub fn width(&self) -> usize {
        self.layer_sizes.iter().copied().max().unwrap_or(0)
    }

    /// Largest degree of an edge label.
    pub fn degree(&self) -> usize {
        self.edges
            .iter()
            .flatten()
            .map(|e| e.label.iter().rposition(|&c| c != 0).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Layered matrix-product evaluation.
    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: point.len(),
            });
        }
        let f = &self.field;
        let mut values = vec![1u64];
        for (l, layer) in self.edges.iter().enumerate() {
            let x = f.reduce(point[self.order[l]]);
            let mut next = vec![0u64; self.layer_sizes[l + 1]];
            for e in layer {
                let lv = horner(f, &e.label, x);
                next[e.to] = f.add(next[e.to], f.mul(values[e.from], lv));
            }
            values = next;
        }
        Ok(values[0])
    }
}

fn horner(f: &Field, coeffs: &[u64], x: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &x in order {
        if x >= n {
            return Err(Error::VariableOutOfRange { index: x, n });
        }
        if !seen.insert(x) {
            return Err(Error::Precondition(format!(
                "x{} appears twice in the reading order",
                x + 1
            )));
        }
    }
    Ok(())
}

/// Expansion of the program as a polynomial, by summing over all paths.
/// Only meant for small programs.
pub fn expand_paths(p: &Roabp) -> Result<SparseMultilinearPoly> {
    let field = p.field;
    let mut partial: Vec<(usize, Vec<(Monomial, u64)>)> = vec![(0, vec![(Monomial::one(), 1)])];
    for (l, layer) in p.edges.iter().enumerate() {
        let x = p.order[l];
        let mut next = Vec::new();
        for (node, poly) in &partial {
            for e in layer.iter().filter(|e| e.from == *node) {
                let mut terms = Vec::new();
                for (m, c) in poly {
                    for (deg, &lc) in e.label.iter().enumerate() {
                        if lc == 0 {
                            continue;
                        }
                        let m2 = match deg {
                            0 => m.clone(),
                            1 => m
                                .mul(&Monomial::var(x))
                                .ok_or_else(|| Error::Internal("variable read twice".into()))?,
                            _ => {
                                return Err(Error::NotMultilinear(format!(
                                    "edge label of degree {deg} in x{}",
                                    x + 1
                                )))
                            }
                        };
                        terms.push((m2, field.mul(*c, lc)));
                    }
                }
                next.push((e.to, terms));
            }
        }
        partial = next;
    }
    SparseMultilinearPoly::from_terms(field, p.n, partial.into_iter().flat_map(|(_, t)| t))
}

impl fmt::Display for Roabp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order: Vec<String> = self.order.iter().map(|x| format!("x{}", x + 1)).collect();
        writeln!(
            f,
            "roabp n={} width={} order={}",
            self.n,
            self.width(),
            order.join(",")
        )?;
        writeln!(
            f,
            "layers {}",
            self.layer_sizes
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        )?;
        for (l, layer) in self.edges.iter().enumerate() {
            let x = self.order[l] + 1;
            for e in layer {
                let label: Vec<String> = e
                    .label
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(d, &c)| {
                        let c = self.field.to_signed(c);
                        match d {
                            0 => format!("{c}"),
                            1 => format!("{c}*x{x}"),
                            _ => format!("{c}*x{x}^{d}"),
                        }
                    })
                    .collect();
                let label = if label.is_empty() {
                    "0".to_string()
                } else {
                    label.join(" + ")
                };
                writeln!(f, "L{} {}->{}: {label}", l + 1, e.from, e.to)?;
            }
        }
        Ok(())
    }
}
