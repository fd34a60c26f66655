use super::expr::{evaluate, OpaqueStack, StackExpr};
use super::fresnel_set::FresnelSet;
use crate::kinematics::TransverseMode;
use crate::materials::MaterialModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Local { material: MaterialModel, thickness: f64 },
    Opaque(OpaqueStack),
}

/// Flat list of layers between two semi-infinite media.
///
/// Local media are addressed as *nodes*: node 0 is the left ambient, nodes
/// `1..=n_local` the local layers in order and the last node the right
/// ambient. Opaque layers sit between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub left: MaterialModel,
    pub layers: Vec<Layer>,
    pub right: MaterialModel,
}

impl LayerStack {
    pub fn new(left: MaterialModel, right: MaterialModel) -> Self {
        Self {
            left,
            layers: Vec::new(),
            right,
        }
    }

    pub fn with_layer(mut self, material: MaterialModel, thickness: f64) -> Result<Self> {
        self.push_layer(material, thickness)?;
        Ok(self)
    }

    pub fn push_layer(&mut self, material: MaterialModel, thickness: f64) -> Result<()> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::Domain(format!("layer thickness must be > 0, got {thickness}")));
        }
        self.layers.push(Layer::Local { material, thickness });
        Ok(())
    }

    pub fn push_opaque(&mut self, stack: OpaqueStack) {
        self.layers.push(Layer::Opaque(stack));
    }

    pub fn is_local(&self) -> bool {
        self.layers.iter().all(|l| matches!(l, Layer::Local { .. }))
    }

    /// Sequence of interfaces, slabs and opaque parts. An opaque part whose
    /// declared left medium differs from the preceding medium gets a
    /// zero-thickness interface in front of it.
    pub fn to_expr(&self) -> StackExpr {
        let mut parts = Vec::with_capacity(2 * self.layers.len() + 1);
        let mut current = self.left.clone();
        for layer in &self.layers {
            match layer {
                Layer::Local { material, thickness } => {
                    parts.push(StackExpr::interface(current, material.clone()));
                    parts.push(StackExpr::Slab {
                        material: material.clone(),
                        thickness: *thickness,
                    });
                    current = material.clone();
                }
                Layer::Opaque(o) => {
                    if o.left() != &current {
                        parts.push(StackExpr::interface(current, o.left().clone()));
                    }
                    parts.push(StackExpr::Opaque(o.clone()));
                    current = o.right().clone();
                }
            }
        }
        parts.push(StackExpr::interface(current, self.right.clone()));
        StackExpr::Sequence(parts)
    }

    pub fn evaluate(&self, mode: &TransverseMode) -> Result<FresnelSet> {
        evaluate(&self.to_expr(), mode)
    }

    pub fn node_count(&self) -> usize {
        2 + self.local_positions().count()
    }

    fn local_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(l, Layer::Local { .. }))
            .map(|(i, _)| i)
    }

    /// Index into `layers` of node `node` (`None` for the ambients).
    fn position(&self, node: usize) -> Result<Option<usize>> {
        let count = self.node_count();
        if node >= count {
            return Err(Error::Domain(format!("node {node} out of range 0..{count}")));
        }
        if node == 0 || node + 1 == count {
            return Ok(None);
        }
        Ok(self.local_positions().nth(node - 1))
    }

    /// Material and thickness of a node (ambients have thickness 0).
    pub fn node(&self, node: usize) -> Result<(MaterialModel, f64)> {
        match self.position(node)? {
            None if node == 0 => Ok((self.left.clone(), 0.0)),
            None => Ok((self.right.clone(), 0.0)),
            Some(i) => match &self.layers[i] {
                Layer::Local { material, thickness } => Ok((material.clone(), *thickness)),
                Layer::Opaque(_) => unreachable!("position() only yields local layers"),
            },
        }
    }

    /// Sub-stack between nodes `a < b`, bounded by their media.
    pub fn between(&self, a: usize, b: usize) -> Result<LayerStack> {
        if a >= b {
            return Err(Error::Domain(format!("need node {a} < node {b}")));
        }
        let start = self.position(a)?.map_or(0, |i| i + 1);
        let end = self.position(b)?.unwrap_or(self.layers.len());
        Ok(LayerStack {
            left: self.node(a)?.0,
            layers: self.layers[start..end].to_vec(),
            right: self.node(b)?.0,
        })
    }
}
