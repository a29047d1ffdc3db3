use crate::error::{Error, Result};
use crate::graph::{ColorId, VertexId};

/// Colors vertices in id order with the smallest color no earlier neighbor
/// has. Colors stay in `0..=delta`.
pub fn greedy_static(n: usize, delta: u32, edges: &[(VertexId, VertexId)]) -> Result<Vec<ColorId>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        for x in [u, v] {
            if x as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: x as u64, n });
            }
        }
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    if let Some((u, a)) = adj.iter().enumerate().find(|(_, a)| a.len() > delta as usize) {
        return Err(Error::DegreeOverflow { vertex: u as VertexId, degree: a.len(), delta });
    }
    let mut colors: Vec<Option<ColorId>> = vec![None; n];
    let mut used = vec![false; delta as usize + 1];
    for u in 0..n {
        let taken: Vec<ColorId> = adj[u].iter().filter_map(|&v| colors[v as usize]).collect();
        for &c in &taken {
            used[c as usize] = true;
        }
        let c = used.iter().position(|&t| !t).expect("deg ≤ Δ leaves a free color") as ColorId;
        for &c in &taken {
            used[c as usize] = false;
        }
        colors[u] = Some(c);
    }
    Ok(colors.into_iter().map(|c| c.unwrap()).collect())
}
