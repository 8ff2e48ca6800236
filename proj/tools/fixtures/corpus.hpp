#pragma once

#include <filesystem>

namespace fixtures {

// data/vocabularies/{coco80,ilsvrc200}.json and data/embeddings/fixture_embeddings.txt
void write_reference_data(const std::filesystem::path& data_dir);

// 300 main-mode image sessions with COCO-style ground truth, mock ASR entries,
// a workspace config and a service manifest.
void write_main_corpus(const std::filesystem::path& data_dir, const std::filesystem::path& out);

// 240 training-mode image sessions (3 annotators x 80) with typed entries and
// with/without phrase hint transcriptions.
void write_training_corpus(const std::filesystem::path& data_dir, const std::filesystem::path& out);

}  // namespace fixtures
