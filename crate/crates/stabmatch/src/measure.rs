//! Node measures (arrival rates) and symmetric edge weights, both exact.

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::rat::Rat;

/// A positive measure with full support on the nodes of a graph, indexed by
/// node id. `total` is cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMeasure {
    values: Vec<Rat>,
    total: Rat,
}

impl NodeMeasure {
    pub fn new(values: Vec<Rat>) -> Result<NodeMeasure> {
        if values.is_empty() {
            return Err(Error::input("empty measure"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_positive()) {
            return Err(Error::input(format!(
                "measure must have full support; value at node index {i} is {}",
                values[i]
            )));
        }
        let total = values.iter().sum();
        Ok(NodeMeasure { values, total })
    }

    /// Parses lines of `node value` where value is a decimal or `p/q`;
    /// every node of `g` must receive exactly one positive value.
    pub fn parse(text: &str, g: &Multigraph) -> Result<NodeMeasure> {
        let mut values: Vec<Option<Rat>> = vec![None; g.node_count()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::input(format!(
                    "line {}: expected `node value`, got {:?}",
                    lineno + 1,
                    line
                )));
            }
            let i = g.node_index(tokens[0])?;
            if values[i].is_some() {
                return Err(Error::input(format!(
                    "node {:?} given more than one value",
                    tokens[0]
                )));
            }
            let v = Rat::parse(tokens[1]).map_err(Error::Input)?;
            values[i] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::input(format!("no value for node {:?}", g.name(i)))))
            .collect::<Result<Vec<_>>>()?;
        NodeMeasure::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn total(&self) -> &Rat {
        &self.total
    }

    pub fn is_normalized(&self) -> bool {
        self.total == Rat::one()
    }

    /// Exact normalization to a probability measure.
    pub fn normalize(&self) -> NodeMeasure {
        let values: Vec<Rat> = self.values.iter().map(|v| v / &self.total).collect();
        let total = values.iter().sum();
        NodeMeasure { values, total }
    }

    pub fn sum_over(&self, indices: &[usize]) -> Rat {
        indices.iter().map(|&i| &self.values[i]).sum()
    }

    pub fn sum_mask(&self, mask: u32) -> Rat {
        let mut acc = Rat::zero();
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc += &self.values[i];
        }
        acc
    }
}

/// Positivity validated when an `EdgeWeights` is built. `Raw` carries
/// unvalidated values (closed-form solutions may be negative; they still
/// solve the balance system and are reported with a flag).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    Strict,
    Nonnegative,
    Raw,
}

/// Symmetric weights on the edges of a graph, indexed like `g.edges()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeights {
    values: Vec<Rat>,
    mode: Positivity,
}

impl EdgeWeights {
    pub fn strict(g: &Multigraph, values: Vec<Rat>) -> Result<EdgeWeights> {
        Self::check_len(g, &values)?;
        if let Some(i) = values.iter().position(|v| !v.is_positive()) {
            return Err(Error::input(format!(
                "strict weights require every value > 0; edge {} has {}",
                g.edge_name(&g.edges()[i]),
                values[i]
            )));
        }
        Ok(EdgeWeights {
            values,
            mode: Positivity::Strict,
        })
    }

    pub fn nonnegative(g: &Multigraph, values: Vec<Rat>) -> Result<EdgeWeights> {
        Self::check_len(g, &values)?;
        if let Some(i) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::input(format!(
                "nonnegative weights require every value >= 0; edge {} has {}",
                g.edge_name(&g.edges()[i]),
                values[i]
            )));
        }
        Ok(EdgeWeights {
            values,
            mode: Positivity::Nonnegative,
        })
    }

    pub fn raw(g: &Multigraph, values: Vec<Rat>) -> Result<EdgeWeights> {
        Self::check_len(g, &values)?;
        Ok(EdgeWeights {
            values,
            mode: Positivity::Raw,
        })
    }

    fn check_len(g: &Multigraph, values: &[Rat]) -> Result<()> {
        if values.len() != g.edge_count() {
            return Err(Error::input(format!(
                "weights must be keyed exactly on the {} edges, got {} values",
                g.edge_count(),
                values.len()
            )));
        }
        Ok(())
    }

    /// Parses lines of `u v value`; every edge of `g` exactly once.
    pub fn parse(text: &str, g: &Multigraph) -> Result<EdgeWeights> {
        let mut values: Vec<Option<Rat>> = vec![None; g.edge_count()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(Error::input(format!(
                    "line {}: expected `u v value`, got {:?}",
                    lineno + 1,
                    line
                )));
            }
            let u = g.node_index(tokens[0])?;
            let v = g.node_index(tokens[1])?;
            let e = g
                .edge_index(u, v)
                .ok_or_else(|| Error::input(format!("no edge {} {}", tokens[0], tokens[1])))?;
            if values[e].is_some() {
                return Err(Error::input(format!(
                    "edge {} {} given more than one weight",
                    tokens[0], tokens[1]
                )));
            }
            values[e] = Some(Rat::parse(tokens[2]).map_err(Error::Input)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(e, v)| {
                v.ok_or_else(|| {
                    Error::input(format!("no weight for edge {}", g.edge_name(&g.edges()[e])))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if values.iter().all(Rat::is_positive) {
            EdgeWeights::strict(g, values)
        } else {
            EdgeWeights::nonnegative(g, values)
        }
    }

    pub fn mode(&self) -> Positivity {
        self.mode
    }

    pub fn get(&self, e: usize) -> &Rat {
        &self.values[e]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> &Rat {
        self.values.iter().min().expect("no edges")
    }

    pub fn scale(&self, c: &Rat) -> EdgeWeights {
        EdgeWeights {
            values: self.values.iter().map(|v| v * c).collect(),
            mode: if c.is_positive() {
                self.mode
            } else {
                Positivity::Raw
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Multigraph;

    fn triangle() -> Multigraph {
        Multigraph::from_named_edges(&[("1", "2"), ("2", "3"), ("1", "3")]).unwrap()
    }

    #[test]
    fn parse_measure() {
        let g = triangle();
        let m = NodeMeasure::parse("1 2/5\n2 7/20\n3 0.25\n", &g).unwrap();
        assert_eq!(m.get(0), &Rat::new(2, 5));
        assert_eq!(m.get(2), &Rat::new(1, 4));
        assert_eq!(m.total(), &Rat::one());
        assert!(m.is_normalized());

        assert!(NodeMeasure::parse("1 1\n2 1\n", &g).is_err()); // node 3 missing
        assert!(NodeMeasure::parse("1 1\n2 1\n3 0\n", &g).is_err()); // zero mass
        assert!(NodeMeasure::parse("1 1\n1 2\n2 1\n3 1\n", &g).is_err()); // duplicate
        assert!(NodeMeasure::parse("4 1\n", &g).is_err()); // unknown node
    }

    #[test]
    fn normalize_examples() {
        let m = NodeMeasure::new(vec![Rat::from_int(2), Rat::one(), Rat::one()]).unwrap();
        let n = m.normalize();
        assert_eq!(n.values(), &[Rat::new(1, 2), Rat::new(1, 4), Rat::new(1, 4)]);
        assert_eq!(n.total(), &Rat::one());
        // already normalized measures are fixed points
        assert_eq!(n.normalize(), n);
        let two = NodeMeasure::new(vec![Rat::new(3, 4), Rat::new(1, 4)]).unwrap();
        assert_eq!(two.normalize(), two);
    }

    #[test]
    fn weights_modes() {
        let g = triangle();
        let w = EdgeWeights::strict(&g, vec![Rat::new(1, 6); 3]).unwrap();
        assert_eq!(w.mode(), Positivity::Strict);
        assert!(EdgeWeights::strict(&g, vec![Rat::zero(); 3]).is_err());
        assert!(EdgeWeights::nonnegative(&g, vec![Rat::zero(); 3]).is_ok());
        assert!(EdgeWeights::strict(&g, vec![Rat::one(); 2]).is_err()); // wrong length

        let parsed = EdgeWeights::parse("1 2 1/6\n2 3 1/6\n1 3 1/6\n", &g).unwrap();
        assert_eq!(parsed, w);
        assert!(EdgeWeights::parse("1 2 1/6\n2 3 1/6\n", &g).is_err());
    }
}
