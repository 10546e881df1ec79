#include "provkg/table.hpp"

#include <algorithm>

namespace provkg {

const Polynomial* Table::find(const Row& row) const {
  auto it = slot_of_.find(row);
  return it == slot_of_.end() ? nullptr : &polys_[it->second];
}

void Table::add(const Row& row, const Polynomial& delta) {
  if (delta.is_zero()) return;
  auto it = slot_of_.find(row);
  if (it != slot_of_.end()) {
    polys_[it->second] += delta;
    return;
  }
  std::uint32_t slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
    rows_[slot] = row;
    polys_[slot] = delta;
    live_[slot] = true;
  } else {
    slot = static_cast<std::uint32_t>(rows_.size());
    rows_.push_back(row);
    polys_.push_back(delta);
    live_.push_back(true);
  }
  slot_of_.emplace(row, slot);
  index_slot(slot);
}

void Table::assign(const Row& row, Polynomial poly) {
  if (poly.is_zero()) {
    erase(row);
    return;
  }
  auto it = slot_of_.find(row);
  if (it == slot_of_.end()) {
    add(row, poly);
    return;
  }
  polys_[it->second] = std::move(poly);
}

void Table::erase(const Row& row) {
  auto it = slot_of_.find(row);
  if (it == slot_of_.end()) return;
  std::uint32_t slot = it->second;
  unindex_slot(slot);
  slot_of_.erase(it);
  live_[slot] = false;
  polys_[slot] = Polynomial();
  rows_[slot].clear();
  free_.push_back(slot);
}

void Table::clear() {
  rows_.clear();
  polys_.clear();
  live_.clear();
  free_.clear();
  slot_of_.clear();
  for (auto& idx : indexes_) idx.buckets.clear();
}

std::size_t Table::ensure_index(const std::vector<std::uint32_t>& cols) {
  for (std::size_t i = 0; i < indexes_.size(); ++i) {
    if (indexes_[i].cols == cols) return i;
  }
  indexes_.push_back({cols, {}});
  std::size_t id = indexes_.size() - 1;
  for (std::uint32_t s = 0; s < rows_.size(); ++s) {
    if (live_[s]) indexes_[id].buckets[key_of(indexes_[id], rows_[s])].push_back(s);
  }
  return id;
}

Row Table::key_of(const Index& idx, const Row& row) const {
  Row key;
  key.reserve(idx.cols.size());
  for (std::uint32_t c : idx.cols) key.push_back(row[c]);
  return key;
}

void Table::index_slot(std::uint32_t slot) {
  for (auto& idx : indexes_) idx.buckets[key_of(idx, rows_[slot])].push_back(slot);
}

void Table::unindex_slot(std::uint32_t slot) {
  for (auto& idx : indexes_) {
    auto it = idx.buckets.find(key_of(idx, rows_[slot]));
    if (it == idx.buckets.end()) continue;
    auto& bucket = it->second;
    auto pos = std::find(bucket.begin(), bucket.end(), slot);
    if (pos != bucket.end()) {
      *pos = bucket.back();
      bucket.pop_back();
    }
    if (bucket.empty()) idx.buckets.erase(it);
  }
}

std::vector<std::pair<Row, Polynomial>> Table::sorted_rows() const {
  std::vector<std::pair<Row, Polynomial>> out;
  out.reserve(size());
  for_each([&](const Row& r, const Polynomial& p) { out.emplace_back(r, p); });
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace provkg
