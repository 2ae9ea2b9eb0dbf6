"""UI components package"""

