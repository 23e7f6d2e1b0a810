//! Word clouds and text tables from importance reports.

mod cloud;
mod table;

pub use cloud::{cloud_svg, layout_cloud, text_extent, CloudStyle, Rect, WordBox, WordCloudLayout, WORD_GAP};
pub use table::{render_table, table_row};
