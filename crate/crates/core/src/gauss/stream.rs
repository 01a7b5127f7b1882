use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Identity of the random generator, embedded in every report header.
pub const GENERATOR_ID: &str =
    "ChaCha8Rng(rand_chacha 0.9)+StandardNormal ziggurat(rand_distr 0.5); chunk=8192; substream=(stream_id<<32)|chunk";

/// A reproducible random stream: a 64-bit seed plus a sub-stream index.
///
/// Monte Carlo jobs of `n` draws are cut into chunks of [`CHUNK`] draws; chunk
/// `j` of a job started from `(seed, s)` reads from the ChaCha stream
/// `(s << 32) | j`. Results are therefore identical regardless of thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        SeededStream { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        SeededStream { seed, stream_id }
    }

    /// Generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Sub-stream used for chunk `j` of a job started from `self`.
    pub fn chunk(&self, j: usize) -> SeededStream {
        SeededStream {
            seed: self.seed,
            stream_id: (self.stream_id << 32) | (j as u64 & 0xffff_ffff),
        }
    }

    /// An independent stream for a sibling job (e.g. the second half of a
    /// paired estimate).
    pub fn fork(&self, k: u64) -> SeededStream {
        SeededStream {
            seed: self.seed ^ (k.wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            stream_id: self.stream_id,
        }
    }

    /// Draws `n` values with `f`, chunked over sub-streams, in canonical order.
    pub fn draw<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng) -> T + Sync + Send,
    {
        let chunks = par::map_chunks(n, |j| {
            let mut rng = self.chunk(j).rng();
            par::chunk_range(j, n).map(|_| f(&mut rng)).collect::<Vec<T>>()
        });
        chunks.into_iter().flatten().collect()
    }

    /// Maps `f` over `n` standard Gaussian vectors in ℝ^dim.
    pub fn map_gaussian<T, F>(&self, dim: usize, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[f64]) -> T + Sync + Send,
    {
        let chunks = par::map_chunks(n, |j| {
            let mut rng = self.chunk(j).rng();
            let mut z = vec![0.0; dim];
            par::chunk_range(j, n)
                .map(|_| {
                    for v in z.iter_mut() {
                        *v = StandardNormal.sample(&mut rng);
                    }
                    f(&z)
                })
                .collect::<Vec<T>>()
        });
        chunks.into_iter().flatten().collect()
    }
}

/// Row-major `rows × cols` matrix of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl SampleMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_mean(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).sum::<f64>() / self.rows as f64
    }
}

/// `count` independent standard Gaussian vectors in ℝ^dim.
///
/// Row `i` is drawn from chunk `i / CHUNK`; within a chunk rows are generated
/// in order, coordinates first.
pub fn sample_gaussian(dim: usize, count: usize, stream: SeededStream) -> Result<SampleMatrix> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "sample_gaussian needs positive dim and count, got dim={dim} count={count}"
        )));
    }
    let chunks = par::map_chunks(count, |j| {
        let mut rng = stream.chunk(j).rng();
        let len = par::chunk_range(j, count).len() * dim;
        (0..len)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect::<Vec<f64>>()
    });
    let mut data = Vec::with_capacity(dim * count);
    for c in chunks {
        data.extend(c);
    }
    debug_assert_eq!(data.len(), dim * count);
    Ok(SampleMatrix { rows: count, cols: dim, data })
}
