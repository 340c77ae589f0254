#pragma once

#include <cstdint>
#include <optional>

namespace gcr::bench {

/// Sequential AVL-tree key-value map. Single-threaded by contract: the
/// workload driver serializes access through the lock under test.
class AvlMap {
public:
    AvlMap() = default;
    ~AvlMap();
    AvlMap(const AvlMap&) = delete;
    AvlMap& operator=(const AvlMap&) = delete;

    /// False (and no change) if the key is already present.
    bool insert(std::int64_t key, std::int64_t value);
    bool remove(std::int64_t key);
    std::optional<std::int64_t> lookup(std::int64_t key) const;

    std::size_t size() const { return size_; }
    std::optional<std::int64_t> root_key() const;

    /// Full sweep of the BST-order, balance-factor and height invariants.
    bool validate() const;

private:
    struct Node {
        std::int64_t key;
        std::int64_t value;
        int height = 1;
        Node* left = nullptr;
        Node* right = nullptr;
    };

    static int height(const Node* n) { return n ? n->height : 0; }
    static void update(Node* n);
    static Node* rotate_left(Node* n);
    static Node* rotate_right(Node* n);
    static Node* rebalance(Node* n);
    Node* insert_at(Node* n, std::int64_t key, std::int64_t value, bool& inserted);
    Node* remove_at(Node* n, std::int64_t key, bool& removed);
    static Node* detach_min(Node* n, Node*& min);
    static void destroy(Node* n);
    static bool check(const Node* n, const std::int64_t* lo, const std::int64_t* hi,
                      int& height_out);

    Node* root_ = nullptr;
    std::size_t size_ = 0;
};

} // namespace gcr::bench
