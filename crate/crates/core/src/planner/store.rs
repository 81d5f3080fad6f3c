use crate::problem::{Control, State};

/// Node set membership. Stored nodes are always Active, Inactive or
/// Terminal; `Unexplored` describes candidates still waiting in V_U.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Active,
    Inactive,
    Terminal,
    Unexplored,
}

impl NodeStatus {
    /// Whether a node may move from `self` to `to`.
    pub fn can_become(self, to: NodeStatus) -> bool {
        use NodeStatus::*;
        matches!(
            (self, to),
            (Unexplored, Active)
                | (Active, Inactive)
                | (Active, Terminal)
                | (Inactive, Active)
                | (Inactive, Terminal)
        )
    }
}

/// The control and duration that produced a node from its parent.
#[derive(Clone, Debug, PartialEq)]
pub struct Incoming {
    pub control: Control,
    pub duration: f64,
}

/// Immutable part of a tree node.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub parent: Option<u32>,
    pub state: State,
    pub incoming: Option<Incoming>,
    /// Cost of the root-to-node path.
    pub acc_cost: f64,
    pub region: usize,
}

/// A freshly propagated node awaiting commit (a V_U entry).
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub parent: u32,
    pub state: State,
    pub control: Control,
    pub duration: f64,
    pub acc_cost: f64,
    pub region: usize,
}

/// Fixed-capacity, append-only tree. Node ids are insertion indices, so every
/// parent id is smaller than its child's.
#[derive(Clone, Debug)]
pub struct NodeStore {
    pub(crate) nodes: Vec<Node>,
    pub(crate) status: Vec<NodeStatus>,
    pub(crate) i_count: Vec<u32>,
    capacity: usize,
}

impl NodeStore {
    pub fn with_root(capacity: usize, root: State, region: usize) -> Self {
        assert!(capacity >= 1);
        assert!(capacity <= u32::MAX as usize, "node ids are 32-bit");
        let mut store = NodeStore {
            nodes: Vec::with_capacity(capacity.min(1 << 16)),
            status: Vec::new(),
            i_count: Vec::new(),
            capacity,
        };
        store.nodes.push(Node {
            parent: None,
            state: root,
            incoming: None,
            acc_cost: 0.0,
            region,
        });
        store.status.push(NodeStatus::Active);
        store.i_count.push(0);
        store
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn remaining(&self) -> usize {
        self.capacity - self.nodes.len()
    }

    pub fn is_full(&self) -> bool {
        self.nodes.len() >= self.capacity
    }

    pub fn node(&self, id: u32) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn status(&self, id: u32) -> NodeStatus {
        self.status[id as usize]
    }

    pub fn i_count(&self, id: u32) -> u32 {
        self.i_count[id as usize]
    }

    /// Appends a committed candidate as an Active node, returning its id, or
    /// `None` when the store is full.
    pub fn commit(&mut self, c: Candidate) -> Option<u32> {
        if self.is_full() {
            return None;
        }
        debug_assert!((c.parent as usize) < self.nodes.len());
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            parent: Some(c.parent),
            state: c.state,
            incoming: Some(Incoming {
                control: c.control,
                duration: c.duration,
            }),
            acc_cost: c.acc_cost,
            region: c.region,
        });
        self.status.push(NodeStatus::Active);
        self.i_count.push(0);
        Some(id)
    }

    /// Overrides a node's status and inactivity counter. Intended for tests
    /// and tools that build trees by hand.
    pub fn set_status(&mut self, id: u32, status: NodeStatus, i_count: u32) {
        self.status[id as usize] = status;
        self.i_count[id as usize] = i_count;
    }

    fn ids_with(&self, s: NodeStatus) -> Vec<u32> {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, &st)| st == s)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// V_A
    pub fn active(&self) -> Vec<u32> {
        self.ids_with(NodeStatus::Active)
    }

    /// V_I
    pub fn inactive(&self) -> Vec<u32> {
        self.ids_with(NodeStatus::Inactive)
    }

    /// V_T
    pub fn terminal(&self) -> Vec<u32> {
        self.ids_with(NodeStatus::Terminal)
    }

    /// Counts of (active, inactive, terminal) nodes.
    pub fn set_sizes(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for s in &self.status {
            match s {
                NodeStatus::Active => counts.0 += 1,
                NodeStatus::Inactive => counts.1 += 1,
                NodeStatus::Terminal => counts.2 += 1,
                NodeStatus::Unexplored => unreachable!("stored nodes are never unexplored"),
            }
        }
        counts
    }

    /// Ids from `id` back to the root, inclusive.
    pub fn path_to_root(&self, id: u32) -> Vec<u32> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur as usize].parent {
            assert!(p < cur, "broken parent chain at node {cur}");
            path.push(p);
            cur = p;
        }
        path
    }
}
