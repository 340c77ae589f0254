#include "gcr/passive_queue.hpp"

namespace gcr {

void PassiveQueue::push_self(QueueNode* n) {
    n->next.store(nullptr);
    n->event.rearm();
    entries_.fetch_add(1);
    QueueNode* prev = tail_.exchange(n);
    if (prev != nullptr) {
        // prev stays queued until its next link is set, so its sequence is
        // safe to read here.
        n->enqueue_seq = prev->enqueue_seq + 1;
        prev->next.store(n);
    } else {
        n->enqueue_seq = last_popped_seq_ + 1;
        top_.store(n);
        n->event.set_and_wake();
    }
    exits_.fetch_add(1);
}

void PassiveQueue::pop_self(QueueNode* n) {
    entries_.fetch_add(1);
    last_popped_seq_ = n->enqueue_seq;
    QueueNode* succ = n->next.load();
    if (succ == nullptr) {
        QueueNode* expected = n;
        if (tail_.compare_exchange_strong(expected, nullptr)) {
            // Not retried on failure: a failure means an enqueuer already
            // installed itself as top.
            expected = n;
            top_.compare_exchange_strong(expected, nullptr);
            exits_.fetch_add(1);
            return;
        }
        // An enqueuer won the tail swap; wait for it to link itself.
        while ((succ = n->next.load()) == nullptr) cpu_relax();
    }
    top_.store(succ);
    succ->event.set_and_wake();
    exits_.fetch_add(1);
}

} // namespace gcr
