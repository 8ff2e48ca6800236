#include <cstring>
#include <exception>
#include <iostream>

#include "corpus.hpp"

int main(int argc, char** argv) {
  try {
    if (argc == 3 && std::strcmp(argv[1], "data") == 0) {
      fixtures::write_reference_data(argv[2]);
      return 0;
    }
    if (argc == 4 && std::strcmp(argv[1], "corpus") == 0) {
      fixtures::write_main_corpus(argv[2], std::filesystem::path(argv[3]) / "coco300");
      fixtures::write_training_corpus(argv[2], std::filesystem::path(argv[3]) / "train240");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "usage: make_fixtures data <data_dir>\n"
               "       make_fixtures corpus <data_dir> <out_dir>\n";
  return 2;
}
