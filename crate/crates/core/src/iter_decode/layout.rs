use crate::code_model::TannerGraph;

/// Edge numbering shared by the decoders: edges of check `c` occupy
/// `check_start[c]..check_start[c + 1]`.
pub(crate) struct EdgeLayout {
    pub check_start: Vec<usize>,
    pub edge_var: Vec<usize>,
    pub var_edges: Vec<Vec<usize>>,
}

impl EdgeLayout {
    pub fn new(g: &TannerGraph) -> Self {
        let mut check_start = Vec::with_capacity(g.m() + 1);
        let mut edge_var = Vec::with_capacity(g.edge_count());
        let mut var_edges = vec![Vec::new(); g.n()];
        check_start.push(0);
        for c in 0..g.m() {
            for &v in g.check_neighbors(c) {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            check_start.push(edge_var.len());
        }
        Self { check_start, edge_var, var_edges }
    }

    pub fn checks(&self) -> usize {
        self.check_start.len() - 1
    }

    pub fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_start[c]..self.check_start[c + 1]
    }
}
