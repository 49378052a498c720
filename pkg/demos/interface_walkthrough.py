"""
Reading a module's interface
============================

Load the small example model, list what flows in and out of it, then draw
that interface into the model file as a commented block pattern.
"""

from slm.fixtures import data_path
from slm.interface import extract_interface, inject_interface_pattern, remove_interface_pattern, render_interface_text
from slm.parser import load_dictionary, load_model

# the model names a data store "A" that lives in a sidecar dictionary
model = load_model(data_path("small_example.sml"))
shared = load_dictionary(data_path("small_example.smd"))

# inputs, outputs and exported functions, including hidden flows such as file blocks
interface = extract_interface(model, [shared])
print(render_interface_text(interface))

# the pattern is commented out, so analyses ignore it
drawn = inject_interface_pattern(model, interface)
added = [b.name for b in drawn.root.blocks if b.commented]
print(f"pattern adds {len(added)} commented blocks, e.g. {added[:3]}")
print("interface unchanged after injection:", extract_interface(drawn, [shared]) == interface)

# and it comes back out cleanly
print("removal restores the original:", remove_interface_pattern(drawn) == model)
