use rustc_hash::FxHashMap;

use super::{Circuit, Gate, NodeId};

/// Append-only circuit builder with Kleene-exact constant folding and structural hashing.
pub struct Builder {
    input_count: usize,
    nodes: Vec<Gate>,
    memo: FxHashMap<Gate, NodeId>,
    c0: Option<NodeId>,
    c1: Option<NodeId>,
}

impl Builder {
    pub fn new(input_count: usize) -> Builder {
        Builder {
            input_count,
            nodes: (0..input_count as u32).map(Gate::Input).collect(),
            memo: FxHashMap::default(),
            c0: None,
            c1: None,
        }
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn input(&self, i: usize) -> NodeId {
        assert!(i < self.input_count, "input {i} out of range");
        i as NodeId
    }

    pub fn inputs(&self) -> Vec<NodeId> {
        (0..self.input_count as NodeId).collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(&mut self, value: bool) -> NodeId {
        let slot = if value { self.c1 } else { self.c0 };
        if let Some(id) = slot {
            return id;
        }
        let id = self.push(if value { Gate::Const1 } else { Gate::Const0 });
        if value {
            self.c1 = Some(id);
        } else {
            self.c0 = Some(id);
        }
        id
    }

    pub fn zero(&mut self) -> NodeId {
        self.constant(false)
    }

    pub fn one(&mut self) -> NodeId {
        self.constant(true)
    }

    pub fn const_value(&self, id: NodeId) -> Option<bool> {
        match self.nodes[id as usize] {
            Gate::Const0 => Some(false),
            Gate::Const1 => Some(true),
            _ => None,
        }
    }

    fn push(&mut self, g: Gate) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(g);
        id
    }

    fn intern(&mut self, g: Gate) -> NodeId {
        if let Some(&id) = self.memo.get(&g) {
            return id;
        }
        let id = self.push(g);
        self.memo.insert(g, id);
        id
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        match self.nodes[a as usize] {
            Gate::Const0 => self.one(),
            Gate::Const1 => self.zero(),
            Gate::Not(inner) => inner,
            _ => self.intern(Gate::Not(a)),
        }
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.const_value(a), self.const_value(b)) {
            (Some(false), _) | (_, Some(false)) => return self.zero(),
            (Some(true), _) => return b,
            (_, Some(true)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        self.intern(Gate::And(a.min(b), a.max(b)))
    }

    pub fn or(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.const_value(a), self.const_value(b)) {
            (Some(true), _) | (_, Some(true)) => return self.one(),
            (Some(false), _) => return b,
            (_, Some(false)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        self.intern(Gate::Or(a.min(b), a.max(b)))
    }

    /// Balanced conjunction; the empty conjunction is 1.
    pub fn and_all(&mut self, items: &[NodeId]) -> NodeId {
        self.reduce(items, true)
    }

    /// Balanced disjunction; the empty disjunction is 0.
    pub fn or_all(&mut self, items: &[NodeId]) -> NodeId {
        self.reduce(items, false)
    }

    fn reduce(&mut self, items: &[NodeId], conj: bool) -> NodeId {
        let mut level: Vec<NodeId> = Vec::with_capacity(items.len());
        for &x in items {
            match self.const_value(x) {
                Some(v) if v == conj => continue,
                Some(_) => return self.constant(!conj),
                None => level.push(x),
            }
        }
        if level.is_empty() {
            return self.constant(conj);
        }
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                next.push(match *pair {
                    [a, b] if conj => self.and(a, b),
                    [a, b] => self.or(a, b),
                    [a] => a,
                    _ => unreachable!(),
                });
            }
            level = next;
        }
        level[0]
    }

    /// Two-input xor as `(a and not b) or (not a and b)`.
    pub fn xor(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.const_value(a), self.const_value(b)) {
            (Some(x), Some(y)) => return self.constant(x != y),
            (Some(false), _) => return b,
            (_, Some(false)) => return a,
            (Some(true), _) => return self.not(b),
            (_, Some(true)) => return self.not(a),
            _ => {}
        }
        let nb = self.not(b);
        let na = self.not(a);
        let l = self.and(a, nb);
        let r = self.and(na, b);
        self.or(l, r)
    }

    /// Hazard-free one-bit multiplexer: `a` when `s = 0`, `b` when `s = 1`,
    /// in consensus form `(a and not s) or (b and s) or (a and b)`.
    pub fn mux(&mut self, a: NodeId, b: NodeId, s: NodeId) -> NodeId {
        if let Some(v) = self.const_value(s) {
            return if v { b } else { a };
        }
        if a == b {
            return a;
        }
        match (self.const_value(a), self.const_value(b)) {
            (Some(false), Some(true)) => return s,
            (Some(true), Some(false)) => return self.not(s),
            (Some(false), _) => return self.and(b, s),
            (Some(true), _) => {
                let ns = self.not(s);
                return self.or(ns, b);
            }
            (_, Some(false)) => {
                let ns = self.not(s);
                return self.and(a, ns);
            }
            (_, Some(true)) => return self.or(a, s),
            _ => {}
        }
        let ns = self.not(s);
        let l = self.and(a, ns);
        let r = self.and(b, s);
        let c = self.and(a, b);
        let lr = self.or(l, r);
        self.or(lr, c)
    }

    /// Copies `c` into this builder with its inputs bound to `inputs`; returns its outputs.
    pub fn embed(&mut self, c: &Circuit, inputs: &[NodeId]) -> Vec<NodeId> {
        assert_eq!(inputs.len(), c.input_count(), "embedded circuit arity");
        let mut map: Vec<NodeId> = Vec::with_capacity(c.nodes().len());
        for g in c.nodes() {
            let id = match *g {
                Gate::Input(k) => inputs[k as usize],
                Gate::Const0 => self.zero(),
                Gate::Const1 => self.one(),
                Gate::Not(a) => self.not(map[a as usize]),
                Gate::And(a, b) => self.and(map[a as usize], map[b as usize]),
                Gate::Or(a, b) => self.or(map[a as usize], map[b as usize]),
            };
            map.push(id);
        }
        c.outputs().iter().map(|&o| map[o as usize]).collect()
    }

    /// Finalizes into a circuit holding the inputs plus every node reachable from `outputs`.
    pub fn finish(self, outputs: &[NodeId]) -> Circuit {
        let mut live = vec![false; self.nodes.len()];
        for &o in outputs {
            live[o as usize] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if live[i] {
                for a in self.nodes[i].operands() {
                    live[a as usize] = true;
                }
            }
        }
        let mut remap = vec![NodeId::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, g) in self.nodes.iter().enumerate() {
            if !(live[i] || matches!(g, Gate::Input(_))) {
                continue;
            }
            remap[i] = nodes.len() as NodeId;
            nodes.push(match *g {
                Gate::Not(a) => Gate::Not(remap[a as usize]),
                Gate::And(a, b) => Gate::And(remap[a as usize], remap[b as usize]),
                Gate::Or(a, b) => Gate::Or(remap[a as usize], remap[b as usize]),
                other => other,
            });
        }
        let outputs = outputs.iter().map(|&o| remap[o as usize]).collect();
        Circuit::new(self.input_count, nodes, outputs).expect("builder output is well formed")
    }
}
