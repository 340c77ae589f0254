#include "gcr/bench/avl_map.hpp"

#include <algorithm>

namespace gcr::bench {

AvlMap::~AvlMap() { destroy(root_); }

void AvlMap::destroy(Node* n) {
    if (!n) return;
    destroy(n->left);
    destroy(n->right);
    delete n;
}

void AvlMap::update(Node* n) {
    n->height = 1 + std::max(height(n->left), height(n->right));
}

AvlMap::Node* AvlMap::rotate_left(Node* n) {
    Node* r = n->right;
    n->right = r->left;
    r->left = n;
    update(n);
    update(r);
    return r;
}

AvlMap::Node* AvlMap::rotate_right(Node* n) {
    Node* l = n->left;
    n->left = l->right;
    l->right = n;
    update(n);
    update(l);
    return l;
}

AvlMap::Node* AvlMap::rebalance(Node* n) {
    update(n);
    int bf = height(n->left) - height(n->right);
    if (bf > 1) {
        if (height(n->left->left) < height(n->left->right))
            n->left = rotate_left(n->left);
        return rotate_right(n);
    }
    if (bf < -1) {
        if (height(n->right->right) < height(n->right->left))
            n->right = rotate_right(n->right);
        return rotate_left(n);
    }
    return n;
}

bool AvlMap::insert(std::int64_t key, std::int64_t value) {
    bool inserted = false;
    root_ = insert_at(root_, key, value, inserted);
    if (inserted) ++size_;
    return inserted;
}

AvlMap::Node* AvlMap::insert_at(Node* n, std::int64_t key, std::int64_t value,
                                bool& inserted) {
    if (!n) {
        inserted = true;
        return new Node{key, value};
    }
    if (key < n->key)
        n->left = insert_at(n->left, key, value, inserted);
    else if (key > n->key)
        n->right = insert_at(n->right, key, value, inserted);
    else
        return n; // duplicate, unchanged
    return rebalance(n);
}

bool AvlMap::remove(std::int64_t key) {
    bool removed = false;
    root_ = remove_at(root_, key, removed);
    if (removed) --size_;
    return removed;
}

AvlMap::Node* AvlMap::detach_min(Node* n, Node*& min) {
    if (!n->left) {
        min = n;
        return n->right;
    }
    n->left = detach_min(n->left, min);
    return rebalance(n);
}

AvlMap::Node* AvlMap::remove_at(Node* n, std::int64_t key, bool& removed) {
    if (!n) return nullptr;
    if (key < n->key) {
        n->left = remove_at(n->left, key, removed);
    } else if (key > n->key) {
        n->right = remove_at(n->right, key, removed);
    } else {
        removed = true;
        if (!n->left || !n->right) {
            Node* child = n->left ? n->left : n->right;
            delete n;
            return child;
        }
        Node* min = nullptr;
        Node* right = detach_min(n->right, min);
        min->left = n->left;
        min->right = right;
        delete n;
        n = min;
    }
    return rebalance(n);
}

std::optional<std::int64_t> AvlMap::lookup(std::int64_t key) const {
    const Node* n = root_;
    while (n) {
        if (key < n->key)
            n = n->left;
        else if (key > n->key)
            n = n->right;
        else
            return n->value;
    }
    return std::nullopt;
}

std::optional<std::int64_t> AvlMap::root_key() const {
    if (!root_) return std::nullopt;
    return root_->key;
}

bool AvlMap::check(const Node* n, const std::int64_t* lo, const std::int64_t* hi,
                   int& height_out) {
    if (!n) {
        height_out = 0;
        return true;
    }
    if (lo && n->key <= *lo) return false;
    if (hi && n->key >= *hi) return false;
    int hl = 0, hr = 0;
    if (!check(n->left, lo, &n->key, hl)) return false;
    if (!check(n->right, &n->key, hi, hr)) return false;
    if (n->height != 1 + std::max(hl, hr)) return false;
    if (hl - hr > 1 || hr - hl > 1) return false;
    height_out = n->height;
    return true;
}

bool AvlMap::validate() const {
    int h = 0;
    return check(root_, nullptr, nullptr, h);
}

} // namespace gcr::bench
