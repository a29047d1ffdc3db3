//! Palette of one vertex, kept as a permutation of `0..=Δ` split in two.
//!
//! Positions `0..s` form the lower palette and `s..=Δ` the upper palette.
//! `A[p]` is the color at position p and `M[c]` the position of color c.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{ColorId, GraphState, VertexId, DENSE_LIMIT};

#[derive(Clone, Debug)]
enum PermStore {
    Identity,
    Dense { a: Vec<ColorId>, m: Vec<u32> },
    Sparse { a: HashMap<u32, ColorId>, m: HashMap<ColorId, u32> },
}

#[derive(Clone, Debug)]
pub struct PartitionedPalette {
    size: u32,
    split: u32,
    store: PermStore,
}

impl PartitionedPalette {
    /// All of `0..=Δ` in the lower palette.
    pub fn new(delta: u32) -> Self {
        PartitionedPalette { size: delta + 1, split: delta + 1, store: PermStore::Identity }
    }

    pub fn num_colors(&self) -> u32 {
        self.size
    }

    pub fn lower_len(&self) -> usize {
        self.split as usize
    }

    pub fn upper_len(&self) -> usize {
        (self.size - self.split) as usize
    }

    pub fn color_at(&self, p: u32) -> ColorId {
        match &self.store {
            PermStore::Identity => p,
            PermStore::Dense { a, .. } => a[p as usize],
            PermStore::Sparse { a, .. } => a.get(&p).copied().unwrap_or(p),
        }
    }

    pub fn position(&self, c: ColorId) -> u32 {
        match &self.store {
            PermStore::Identity => c,
            PermStore::Dense { m, .. } => m[c as usize],
            PermStore::Sparse { m, .. } => m.get(&c).copied().unwrap_or(c),
        }
    }

    pub fn is_upper(&self, c: ColorId) -> bool {
        c < self.size && self.position(c) >= self.split
    }

    /// The first `k` colors of the lower palette.
    pub fn lower_prefix(&self, k: usize) -> Vec<ColorId> {
        let k = k.min(self.lower_len()) as u32;
        (0..k).map(|p| self.color_at(p)).collect()
    }

    pub fn lower_colors(&self) -> impl Iterator<Item = ColorId> + '_ {
        (0..self.split).map(|p| self.color_at(p))
    }

    pub fn upper_colors(&self) -> impl Iterator<Item = ColorId> + '_ {
        (self.split..self.size).map(|p| self.color_at(p))
    }

    fn swap(&mut self, p: u32, q: u32) {
        if p == q {
            return;
        }
        if matches!(self.store, PermStore::Identity) {
            self.store = if self.size <= DENSE_LIMIT + 1 {
                PermStore::Dense { a: (0..self.size).collect(), m: (0..self.size).collect() }
            } else {
                PermStore::Sparse { a: HashMap::new(), m: HashMap::new() }
            };
        }
        let (cp, cq) = (self.color_at(p), self.color_at(q));
        match &mut self.store {
            PermStore::Identity => unreachable!(),
            PermStore::Dense { a, m } => {
                a.swap(p as usize, q as usize);
                m[cp as usize] = q;
                m[cq as usize] = p;
            }
            PermStore::Sparse { a, m } => {
                let mut put = |pos: u32, color: ColorId| {
                    if pos == color {
                        a.remove(&pos);
                        m.remove(&color);
                    } else {
                        a.insert(pos, color);
                        m.insert(color, pos);
                    }
                };
                put(q, cp);
                put(p, cq);
            }
        }
    }

    /// Sorted, deduplicated colors from `colors` that lie on the requested side.
    fn select(&self, colors: &[ColorId], upper: bool) -> Result<Vec<ColorId>> {
        if let Some(&c) = colors.iter().find(|&&c| c >= self.size) {
            return Err(Error::ColorOutOfRange { color: c, max: self.size - 1 });
        }
        let mut out: Vec<ColorId> = colors.iter().copied().filter(|&c| self.is_upper(c) == upper).collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Moves the lower colors among `colors` into the upper palette.
    /// Colors already upper are ignored. Returns how many moved.
    pub fn move_up(&mut self, colors: &[ColorId]) -> Result<usize> {
        let sel = self.select(colors, false)?;
        for &c in &sel {
            let p = self.position(c);
            self.swap(p, self.split - 1);
            self.split -= 1;
        }
        Ok(sel.len())
    }

    /// Moves the upper colors among `colors` into the lower palette.
    pub fn move_down(&mut self, colors: &[ColorId]) -> Result<usize> {
        let sel = self.select(colors, true)?;
        for &c in &sel {
            let p = self.position(c);
            self.swap(p, self.split);
            self.split += 1;
        }
        Ok(sel.len())
    }

    /// Moves the lower colors among `colors` to the back of the lower
    /// palette, keeping the split. Returns how many were moved.
    pub fn rearrange_lower(&mut self, colors: &[ColorId]) -> Result<usize> {
        let sel = self.select(colors, false)?;
        let mut end = self.split;
        for &c in &sel {
            end -= 1;
            let p = self.position(c);
            self.swap(p, end);
        }
        Ok(sel.len())
    }

    pub(crate) fn check_permutation(&self) -> std::result::Result<(), String> {
        match &self.store {
            PermStore::Identity => Ok(()),
            PermStore::Dense { a, m } => {
                for p in 0..self.size {
                    if m[a[p as usize] as usize] != p {
                        return Err(format!("A/M disagree at position {p}"));
                    }
                }
                Ok(())
            }
            PermStore::Sparse { a, m } => {
                if a.len() != m.len() {
                    return Err("sparse maps differ in size".into());
                }
                for (&p, &c) in a {
                    if c >= self.size || self.position(c) != p {
                        return Err(format!("A/M disagree at position {p}"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Moves the colors used by lower neighbors to the back of the lower
/// palette. The returned count is the length of the prefix holding the
/// blank colors: lower-palette colors no lower neighbor uses.
pub fn build_blank_prefix(g: &mut GraphState, u: VertexId) -> Result<usize> {
    let used: Vec<ColorId> = g.below(u).iter().filter_map(|&v| g.color(v)).collect();
    let pal = g.palette_mut(u);
    let moved = pal.rearrange_lower(&used)?;
    Ok(pal.lower_len() - moved)
}

/// Like [`build_blank_prefix`] but only colors used by at least two lower
/// neighbors are moved out, so the prefix holds blank and unique colors.
pub fn build_blank_unique_prefix(g: &mut GraphState, u: VertexId) -> Result<usize> {
    let mut used: Vec<ColorId> = g.below(u).iter().filter_map(|&v| g.color(v)).collect();
    used.sort_unstable();
    let repeated: Vec<ColorId> = used.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
    let pal = g.palette_mut(u);
    let moved = pal.rearrange_lower(&repeated)?;
    Ok(pal.lower_len() - moved)
}
