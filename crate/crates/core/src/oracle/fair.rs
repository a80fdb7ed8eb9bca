//! Fair-cycle detection on explicit graphs.

/// Strongly connected components of the subgraph induced by `keep`
/// (iterative Tarjan). Each component lists its nodes.
pub fn strongly_connected_components(succ: &[Vec<usize>], keep: &[bool]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if !keep[root] || index[root] != usize::MAX {
            continue;
        }
        // (node, next edge position)
        let mut work = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = work.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if !keep[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Looks for a cycle through nodes outside `goal` that visits every set in
/// `fair` infinitely often. Returns the nodes of such a component.
pub fn fair_cycle_without(succ: &[Vec<usize>], fair: &[Vec<bool>], goal: &[bool]) -> Option<Vec<usize>> {
    let keep: Vec<bool> = goal.iter().map(|g| !g).collect();
    strongly_connected_components(succ, &keep).into_iter().find(|comp| {
        let cyclic = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
        cyclic && fair.iter().all(|f| comp.iter().any(|&v| f[v]))
    })
}
