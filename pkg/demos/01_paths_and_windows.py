"""
Accessible paths on a single line of labels
===========================================

A path is k-accessible when we can pick an increasing run of labels from the
root to the leaf, never jumping more than k steps at a time.
"""

from kaccess import check_path, path_witness

labels = [53, 99, 68, 4, 71]

# With k = 1 every step must go up, and 99 -> 68 goes down.
print("k=1:", check_path(labels, 1))

# With k = 2 we may step over one vertex, so 53 -> 68 -> 71 works.
positions = path_witness(labels, 2)
print("k=2:", check_path(labels, 2), "via", [labels[i] for i in positions])

# A longer example that needs two separate skips.
other = [53, 65, 13, 78, 26, 91]
print(other, "k=2:", path_witness(other, 2))

# Raising k never hurts: a witness for k stays a witness for k + 1.
for k in range(1, 5):
    print(f"[3, 1, 2, 0, 4] with k={k}:", check_path([3, 1, 2, 0, 4], k))
