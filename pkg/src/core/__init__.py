# Core Package - Complex Arithmetic, Activations, Backpropagation, Capacity, Initialization
