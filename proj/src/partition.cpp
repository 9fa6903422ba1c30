#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <numeric>

#include "spgo/decomposition.hpp"

namespace spgo {

Partition::Partition(int n, std::vector<int> parts) : n_(n), parts_(std::move(parts)) {
  if (n_ < 1) throw PartitionError("partition requires n >= 1");
  if (parts_.empty()) throw PartitionError("partition requires at least one part (s >= 1)");
  for (int p : parts_)
    if (p < 1) throw PartitionError("partition parts must be positive");
  const int total = std::accumulate(parts_.begin(), parts_.end(), 0);
  if (total > n_)
    throw PartitionError("parts sum to " + std::to_string(total) + " which exceeds n = " + std::to_string(n_));
  n0_ = n_ - total;
}

int Partition::block_size(int j) const {
  if (j < 0 || j > s()) throw std::out_of_range("block index out of range");
  return j == 0 ? n0_ : parts_[static_cast<std::size_t>(j - 1)];
}

int Partition::block_begin(int j) const {
  int begin = 1;
  for (int k = 0; k < j; ++k) begin += block_size(k);
  return begin;
}

int Partition::block_end(int j) const { return block_begin(j) + block_size(j) - 1; }

int Partition::block_of(int index) const {
  if (index < 1 || index > n_) throw std::out_of_range("matrix index out of range");
  int end = 0;
  for (int j = 0; j <= s(); ++j) {
    end += block_size(j);
    if (index <= end) return j;
  }
  throw std::logic_error("index not covered by any block");
}

std::string Partition::to_string() const {
  std::string out = std::to_string(n_) + ":";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i > 0) out += "+";
    out += std::to_string(parts_[i]);
  }
  return out;
}

namespace {

int parse_positive(std::string_view text, std::string_view what) {
  if (text.empty()) throw PartitionError("empty " + std::string(what) + " in partition");
  for (char c : text)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw PartitionError("invalid character '" + std::string(1, c) + "' in partition");
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw PartitionError("number out of range in partition");
  if (value < 1) throw PartitionError(std::string(what) + " must be positive");
  return value;
}

}  // namespace

Partition parse_partition(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw PartitionError("partition must look like 'n:n1+n2+...'");
  const int n = parse_positive(text.substr(0, colon), "n");
  std::vector<int> parts;
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    const auto plus = rest.find('+');
    parts.push_back(parse_positive(rest.substr(0, plus), "part"));
    if (plus == std::string_view::npos) break;
    rest = rest.substr(plus + 1);
  }
  return Partition(n, std::move(parts));
}

std::vector<Partition> enumerate_partitions(int n) {
  std::vector<Partition> out;
  std::vector<int> current;
  std::function<void(int, int)> rec = [&](int remaining, int max_part) {
    if (remaining == 0) {
      out.emplace_back(n, current);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      current.push_back(p);
      rec(remaining - p, p);
      current.pop_back();
    }
  };
  for (int total = n; total >= 1; --total) rec(total, total);
  return out;
}

std::string ModuleLabel::to_string() const {
  switch (type) {
    case Type::N: return "N";
    case Type::H: return "H" + std::to_string(j);
    case Type::M: return "M" + std::to_string(i) + std::to_string(j);
    case Type::Msub: return "M0" + std::to_string(j) + "." + std::to_string(l);
  }
  return "?";
}

ModuleLabel parse_module_label(std::string_view text) {
  auto digit = [&](char c) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("invalid module label '" + std::string(text) + "'");
    return c - '0';
  };
  if (text == "N") return ModuleLabel::n_block();
  if (text.size() >= 2 && text[0] == 'H') {
    int j = 0;
    for (char c : text.substr(1)) j = 10 * j + digit(c);
    return ModuleLabel::h(j);
  }
  if (text.size() >= 3 && text[0] == 'M') {
    const int i = digit(text[1]);
    const int j = digit(text[2]);
    if (text.size() == 3) {
      if (i >= j) throw std::invalid_argument("module label M<i><j> requires i < j: '" + std::string(text) + "'");
      return ModuleLabel::m(i, j);
    }
    if (text[3] == '.' && text.size() > 4 && i == 0) {
      int l = 0;
      for (char c : text.substr(4)) l = 10 * l + digit(c);
      if (j < 1 || l < 1) throw std::invalid_argument("invalid sub-block label '" + std::string(text) + "'");
      return ModuleLabel::msub(j, l);
    }
  }
  throw std::invalid_argument("invalid module label '" + std::string(text) + "'");
}

}  // namespace spgo
