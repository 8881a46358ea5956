//! On-disk formats and report writers.

mod attrs;
mod curves;
mod emb;
mod report;
mod svg;

pub use attrs::{
    bin_labels, format_attrs, parse_attrs, read_attrs, write_attrs, AttrSchema, ColumnKind, ColumnSchema,
};
pub use curves::{format_curves, parse_curves, read_curves, write_curves};
pub use emb::{decode_emb, encode_emb, read_emb, write_emb, HEADER_LEN, MAGIC};
pub use report::{
    digest_file, distances_csv, energy_csv, macro_csv, sha256_hex, toy_csv, Envelope, InputDigest,
    SCHEMA_VERSION,
};
pub use svg::{line_chart, Series};
