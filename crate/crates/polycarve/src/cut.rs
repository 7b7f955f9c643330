use crate::plane::Plane;

/// What a cut is tangent to / derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFeature {
    /// One of the six bounding-box faces (0..6).
    BoxFace(usize),
    /// A mesh edge index.
    Edge(usize),
    /// A mesh face index.
    Face(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    DSeparation,
    Box,
    Edge,
    Face,
}

impl CutKind {
    pub fn label(self) -> &'static str {
        match self {
            CutKind::DSeparation => "dsep",
            CutKind::Box => "box",
            CutKind::Edge => "edge",
            CutKind::Face => "face",
        }
    }
}

/// One guillotine cut of the plan.
///
/// The plane is stored oriented: the kept side (containing the part) is the
/// non-positive side, so the normal points away from the part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cut {
    pub plane: Plane,
    pub kind: CutKind,
    /// Face-round index for carving cuts.
    pub face_round: Option<usize>,
    /// Edge-round index within the chain, for edge cuts.
    pub edge_round: Option<usize>,
    pub source: Option<SourceFeature>,
    /// Area of the new face created when this cut was applied.
    pub cost: f64,
}
