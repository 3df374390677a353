//! The Cayley graph `G_{q^e}` on `Z/q^e` with connection set the unit squares.

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::number_theory::{unit_squares, GraphParams, QuadraticCharacter};

/// Immutable `G_{q^e}`. Vertices are the residues `0..n`.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    params: GraphParams,
    connection_set: Vec<u64>,
    rows: Vec<Bitset>,
    character: QuadraticCharacter,
}

impl CayleyGraph {
    /// Build from `(q, e)`, validating the parameters.
    pub fn new(q: u64, e: u32) -> Result<Self> {
        build_graph(GraphParams::new(q, e)?)
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n() as usize
    }

    pub fn degree(&self) -> u64 {
        self.params.degree()
    }

    /// Sorted connection set `T`.
    pub fn connection_set(&self) -> &[u64] {
        &self.connection_set
    }

    pub fn character(&self) -> &QuadraticCharacter {
        &self.character
    }

    pub fn row(&self, v: usize) -> &Bitset {
        &self.rows[v]
    }

    pub fn rows(&self) -> &[Bitset] {
        &self.rows
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[v].iter_ones()
    }

    pub fn edge_count(&self) -> u64 {
        self.params.n() * self.params.degree() / 2
    }

    pub fn check_vertex(&self, v: u64) -> Result<()> {
        if v >= self.params.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.params.n(),
            });
        }
        Ok(())
    }

    pub fn is_adjacent(&self, x: u64, y: u64) -> Result<bool> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(self.rows[x as usize].contains(y as usize))
    }

    /// Edge list: header `n m`, then `u v` with `u < v` in lexicographic order.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.params.n(), self.edge_count())?;
        for u in 0..self.n() {
            for v in self.rows[u].iter_ones().filter(|&v| v > u) {
                writeln!(out, "{u} {v}")?;
            }
        }
        Ok(())
    }

    pub fn export_edge_list(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io)?;
        let mut out = BufWriter::new(file);
        self.write_edge_list(&mut out).map_err(io)?;
        out.flush().map_err(io)
    }
}

/// Largest `n` for which the dense `n x n` bit matrix is built (128 MiB).
pub const DENSE_VERTEX_CAP: u64 = 1 << 15;

/// Row 0 is the indicator of `T`; row `x` is row 0 rotated by `x`.
pub fn build_graph(params: GraphParams) -> Result<CayleyGraph> {
    if params.n() > DENSE_VERTEX_CAP {
        return Err(Error::CapExceeded {
            what: "dense adjacency",
            n: params.n(),
            cap: DENSE_VERTEX_CAP,
        });
    }
    let n = params.n() as usize;
    let connection_set = unit_squares(&params);
    let base = Bitset::from_indices(n, connection_set.iter().map(|&s| s as usize));
    let rows = (0..n).map(|x| base.rotate_up(x)).collect();
    Ok(CayleyGraph {
        params,
        connection_set,
        rows,
        character: QuadraticCharacter::new(params),
    })
}
